//! Finite posets given by their cover relation.
//!
//! Elements are the dense integers `0..m`. A cover pair `(a, b)` means `b`
//! covers `a`. The strict order is the transitive closure of the covers and
//! is computed lazily, so large trusted constructions (blowups) never pay for
//! it unless they ask.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Wire form of a poset: `{"m": 3, "covers": [[0, 1], [1, 2]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetSpec {
    pub m: usize,
    pub covers: Vec<[usize; 2]>,
}

#[derive(Clone)]
pub struct Poset {
    m: usize,
    covers: Vec<(usize, usize)>,
    upper: Vec<Vec<usize>>,
    lower: Vec<Vec<usize>>,
    above: OnceLock<Vec<FixedBitSet>>,
}

impl PartialEq for Poset {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.covers == other.covers
    }
}

impl Eq for Poset {}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Poset")
            .field("m", &self.m)
            .field("covers", &self.covers)
            .finish()
    }
}

/// Undirected Hasse graph of a poset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HasseGraph {
    adj: Vec<Vec<usize>>,
}

impl HasseGraph {
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_connected(&self) -> bool {
        if self.adj.is_empty() {
            return true;
        }
        self.distances_from(0).iter().all(Option::is_some)
    }

    /// Breadth-first distances from `root`; `None` for unreachable vertices.
    pub fn distances_from(&self, root: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.adj.len()];
        dist[root] = Some(0);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for &w in &self.adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_tree(&self) -> bool {
        !self.adj.is_empty() && self.edge_count() + 1 == self.adj.len() && self.is_connected()
    }
}

/// A total ordering `x_1, ..., x_m` of a tree poset, rooted at `x_1`, in which
/// every prefix induces a subtree of the Hasse diagram and each `x_i` (i > 1)
/// is a leaf of its prefix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafOrdering {
    pub root: usize,
    pub order: Vec<usize>,
}

impl LeafOrdering {
    /// Position of each element in the ordering.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.order.len()];
        for (i, &e) in self.order.iter().enumerate() {
            pos[e] = i;
        }
        pos
    }

    /// Checks both prefix properties against `poset`.
    pub fn is_valid_for(&self, poset: &Poset) -> bool {
        let m = poset.len();
        if self.order.len() != m || self.order.first() != Some(&self.root) {
            return false;
        }
        let mut seen = vec![false; m];
        for &e in &self.order {
            if e >= m || seen[e] {
                return false;
            }
            seen[e] = true;
        }
        let hasse = poset.hasse();
        let mut in_prefix = vec![false; m];
        for (i, &e) in self.order.iter().enumerate() {
            let back = hasse.neighbors(e).iter().filter(|&&w| in_prefix[w]).count();
            // Exactly one edge back keeps the prefix connected and acyclic.
            if (i == 0 && back != 0) || (i > 0 && back != 1) {
                return false;
            }
            in_prefix[e] = true;
        }
        true
    }
}

impl Poset {
    /// Validates a cover relation and builds the poset.
    pub fn new(m: usize, covers: &[(usize, usize)]) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &(a, b) in covers {
            for e in [a, b] {
                if e >= m {
                    return Err(Error::IndexOutOfRange { element: e, m });
                }
            }
            if a == b {
                return Err(Error::Cycle(a));
            }
            if !seen.insert((a, b)) {
                return Err(Error::DuplicateCover(a, b));
            }
        }
        let poset = Self::build(m, seen.into_iter().collect());
        poset.topological_order()?;
        for &(a, c) in &poset.covers {
            let implied = poset.upper[a]
                .iter()
                .any(|&b| b != c && poset.less(b, c));
            if implied {
                return Err(Error::NotReduced(a, c));
            }
        }
        Ok(poset)
    }

    /// Builds a poset from any strict-order generating relation, reducing it
    /// to its covers first.
    pub fn from_relation(m: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut unique: BTreeSet<(usize, usize)> = BTreeSet::new();
        for &(a, b) in pairs {
            for e in [a, b] {
                if e >= m {
                    return Err(Error::IndexOutOfRange { element: e, m });
                }
            }
            if a == b {
                return Err(Error::Cycle(a));
            }
            unique.insert((a, b));
        }
        let raw = Self::build(m, unique.into_iter().collect());
        raw.topological_order()?;
        let reduced: Vec<(usize, usize)> = raw
            .covers
            .iter()
            .copied()
            .filter(|&(a, c)| !raw.upper[a].iter().any(|&b| b != c && raw.less(b, c)))
            .collect();
        Ok(Self::build(m, reduced))
    }

    /// Builds a poset from covers known to be acyclic and reduced. Every
    /// orientation of a tree qualifies.
    pub(crate) fn from_trusted(m: usize, mut covers: Vec<(usize, usize)>) -> Self {
        covers.sort_unstable();
        covers.dedup();
        Self::build(m, covers)
    }

    fn build(m: usize, covers: Vec<(usize, usize)>) -> Self {
        let mut upper = vec![Vec::new(); m];
        let mut lower = vec![Vec::new(); m];
        for &(a, b) in &covers {
            upper[a].push(b);
            lower[b].push(a);
        }
        for list in upper.iter_mut().chain(lower.iter_mut()) {
            list.sort_unstable();
        }
        Poset {
            m,
            covers,
            upper,
            lower,
            above: OnceLock::new(),
        }
    }

    pub fn from_spec(spec: &PosetSpec) -> Result<Self> {
        let covers: Vec<(usize, usize)> = spec.covers.iter().map(|c| (c[0], c[1])).collect();
        Self::new(spec.m, &covers)
    }

    pub fn to_spec(&self) -> PosetSpec {
        PosetSpec {
            m: self.m,
            covers: self.covers.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }

    pub fn chain(k: usize) -> Self {
        Self::from_trusted(k, (1..k).map(|i| (i - 1, i)).collect())
    }

    pub fn antichain(m: usize) -> Self {
        Self::from_trusted(m, Vec::new())
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    /// Cover pairs `(a, b)` with `b` covering `a`, sorted.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    /// Elements covering `a`.
    pub fn upper_covers(&self, a: usize) -> &[usize] {
        &self.upper[a]
    }

    /// Elements covered by `a`.
    pub fn lower_covers(&self, a: usize) -> &[usize] {
        &self.lower[a]
    }

    pub fn covers_pair(&self, a: usize, b: usize) -> bool {
        self.upper[a].binary_search(&b).is_ok()
    }

    fn topological_order(&self) -> Result<Vec<usize>> {
        let mut indeg: Vec<usize> = self.lower.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (0..self.m).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(self.m);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &self.upper[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        if order.len() < self.m {
            let stuck = (0..self.m).find(|&v| indeg[v] > 0).unwrap();
            return Err(Error::Cycle(stuck));
        }
        Ok(order)
    }

    fn above_sets(&self) -> &[FixedBitSet] {
        self.above.get_or_init(|| {
            let order = self
                .topological_order()
                .expect("validated posets are acyclic");
            let mut above = vec![FixedBitSet::with_capacity(self.m); self.m];
            for &a in order.iter().rev() {
                let mut set = FixedBitSet::with_capacity(self.m);
                for &b in &self.upper[a] {
                    set.insert(b);
                    set.union_with(&above[b]);
                }
                above[a] = set;
            }
            above
        })
    }

    /// Strict order `a < b`.
    pub fn less(&self, a: usize, b: usize) -> bool {
        self.above_sets()[a].contains(b)
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        a == b || self.less(a, b)
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.less(a, b) || self.less(b, a)
    }

    /// All strict order pairs `(a, b)` with `a < b`, sorted.
    pub fn order_pairs(&self) -> Vec<(usize, usize)> {
        let above = self.above_sets();
        (0..self.m)
            .flat_map(|a| above[a].ones().map(move |b| (a, b)))
            .collect()
    }

    /// Elements strictly above `a`.
    pub fn up_set(&self, a: usize) -> Vec<usize> {
        self.above_sets()[a].ones().collect()
    }

    /// Elements strictly below `a`.
    pub fn down_set(&self, a: usize) -> Vec<usize> {
        (0..self.m).filter(|&b| self.less(b, a)).collect()
    }

    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.m).filter(|&v| self.lower[v].is_empty()).collect()
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.m).filter(|&v| self.upper[v].is_empty()).collect()
    }

    pub fn is_minimal(&self, v: usize) -> bool {
        self.lower[v].is_empty()
    }

    pub fn is_maximal(&self, v: usize) -> bool {
        self.upper[v].is_empty()
    }

    pub fn hasse(&self) -> HasseGraph {
        let mut adj = vec![Vec::new(); self.m];
        for &(a, b) in &self.covers {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        HasseGraph { adj }
    }

    /// Shortest and longest number of elements on a cover path from a minimal
    /// element up to each element.
    fn level_bounds(&self) -> Vec<(usize, usize)> {
        let order = self.topological_order().expect("validated posets are acyclic");
        let mut bounds = vec![(0usize, 0usize); self.m];
        for &v in &order {
            bounds[v] = if self.lower[v].is_empty() {
                (1, 1)
            } else {
                let lo = self.lower[v].iter().map(|&u| bounds[u].0).min().unwrap();
                let hi = self.lower[v].iter().map(|&u| bounds[u].1).max().unwrap();
                (lo + 1, hi + 1)
            };
        }
        bounds
    }

    /// Number of elements in a longest chain ending at each element.
    pub fn levels(&self) -> Vec<usize> {
        self.level_bounds().into_iter().map(|(_, hi)| hi).collect()
    }

    /// Number of elements in a longest chain.
    pub fn height(&self) -> usize {
        self.levels().into_iter().max().unwrap_or(0)
    }

    pub fn is_tree(&self) -> bool {
        self.hasse().is_tree()
    }

    /// Every maximal chain has the same number of elements.
    pub fn is_graded(&self) -> bool {
        let bounds = self.level_bounds();
        let mut sizes = self
            .maximal_elements()
            .into_iter()
            .flat_map(|v| [bounds[v].0, bounds[v].1]);
        match sizes.next() {
            None => true,
            Some(first) => sizes.all(|s| s == first),
        }
    }

    pub fn is_chain(&self) -> bool {
        self.m > 0 && self.height() == self.m
    }

    /// All maximal chains as ascending element lists, in lexicographic order.
    pub fn maximal_chains(&self) -> Vec<Vec<usize>> {
        fn walk(p: &Poset, v: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            path.push(v);
            if p.upper[v].is_empty() {
                out.push(path.clone());
            } else {
                for &w in &p.upper[v] {
                    walk(p, w, path, out);
                }
            }
            path.pop();
        }
        let mut out = Vec::new();
        for v in self.minimal_elements() {
            walk(self, v, &mut Vec::new(), &mut out);
        }
        out.sort();
        out
    }

    pub fn count_maximal_chains(&self) -> u128 {
        let order = self.topological_order().expect("validated posets are acyclic");
        let mut ways = vec![0u128; self.m];
        for &v in &order {
            ways[v] = if self.lower[v].is_empty() {
                1
            } else {
                self.lower[v].iter().map(|&u| ways[u]).sum()
            };
        }
        self.maximal_elements().iter().map(|&v| ways[v]).sum()
    }

    /// The interval `{z : x <= z <= y}`, ascending along the order.
    pub fn interval(&self, x: usize, y: usize) -> Vec<usize> {
        if !self.leq(x, y) {
            return Vec::new();
        }
        let mut members: Vec<usize> = (0..self.m)
            .filter(|&z| self.leq(x, z) && self.leq(z, y))
            .collect();
        members.sort_by_key(|&z| self.down_set(z).len());
        members
    }

    /// A set of elements is totally ordered.
    pub fn is_chain_set(&self, elems: &[usize]) -> bool {
        elems.iter().enumerate().all(|(i, &a)| {
            elems[i + 1..]
                .iter()
                .all(|&b| a != b && self.comparable(a, b))
        })
    }

    /// The order dual: every cover pair reversed.
    pub fn dual(&self) -> Poset {
        Self::from_trusted(self.m, self.covers.iter().map(|&(a, b)| (b, a)).collect())
    }

    /// The leaf ordering rooted at `root`: repeatedly append the smallest
    /// element adjacent to the current prefix.
    pub fn leaf_ordering(&self, root: usize) -> Result<LeafOrdering> {
        if root >= self.m {
            return Err(Error::IndexOutOfRange { element: root, m: self.m });
        }
        let hasse = self.hasse();
        if !hasse.is_tree() {
            return Err(Error::NotTree);
        }
        let mut in_prefix = vec![false; self.m];
        let mut frontier = BTreeSet::from([root]);
        let mut order = Vec::with_capacity(self.m);
        while let Some(v) = frontier.pop_first() {
            in_prefix[v] = true;
            order.push(v);
            frontier.extend(hasse.neighbors(v).iter().copied().filter(|&w| !in_prefix[w]));
        }
        Ok(LeafOrdering { root, order })
    }

    /// The subposet induced on `keep`, with elements renumbered in the order
    /// given. Returns the subposet and the map from new to old indices.
    pub fn induced(&self, keep: &[usize]) -> (Poset, Vec<usize>) {
        let mut index = vec![usize::MAX; self.m];
        for (i, &e) in keep.iter().enumerate() {
            index[e] = i;
        }
        let mut pairs = Vec::new();
        for (i, &a) in keep.iter().enumerate() {
            for (j, &b) in keep.iter().enumerate() {
                if self.less(a, b) {
                    pairs.push((i, j));
                }
            }
        }
        let sub = Self::from_relation(keep.len(), &pairs).expect("restriction of a partial order");
        (sub, keep.to_vec())
    }

    /// Relabels elements: new element `perm[e]` plays the role of old `e`.
    pub fn relabel(&self, perm: &[usize]) -> Poset {
        Self::from_trusted(
            self.m,
            self.covers.iter().map(|&(a, b)| (perm[a], perm[b])).collect(),
        )
    }

    /// Isomorphism test by brute force over relabelings that preserve level
    /// and degree. Intended for small posets in tests and fixtures.
    pub fn is_isomorphic(&self, other: &Poset) -> bool {
        if self.m != other.m || self.covers.len() != other.covers.len() {
            return false;
        }
        let sig = |p: &Poset| -> Vec<(usize, usize, usize)> {
            let levels = p.levels();
            (0..p.m)
                .map(|v| (levels[v], p.upper[v].len(), p.lower[v].len()))
                .collect()
        };
        let (sa, sb) = (sig(self), sig(other));
        let mut perm = vec![usize::MAX; self.m];
        let mut used = vec![false; self.m];
        fn go(
            a: &Poset,
            b: &Poset,
            sa: &[(usize, usize, usize)],
            sb: &[(usize, usize, usize)],
            v: usize,
            perm: &mut [usize],
            used: &mut [bool],
        ) -> bool {
            if v == a.m {
                return true;
            }
            for w in 0..b.m {
                if used[w] || sa[v] != sb[w] {
                    continue;
                }
                let consistent = a.upper[v]
                    .iter()
                    .filter(|&&u| u < v)
                    .all(|&u| b.covers_pair(w, perm[u]))
                    && a.lower[v]
                        .iter()
                        .filter(|&&u| u < v)
                        .all(|&u| b.covers_pair(perm[u], w));
                if !consistent {
                    continue;
                }
                perm[v] = w;
                used[w] = true;
                if go(a, b, sa, sb, v + 1, perm, used) {
                    return true;
                }
                used[w] = false;
            }
            false
        }
        go(self, other, &sa, &sb, 0, &mut perm, &mut used)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v_poset() -> Poset {
        Poset::new(3, &[(0, 1), (0, 2)]).unwrap()
    }

    fn x_poset() -> Poset {
        Poset::new(5, &[(0, 2), (1, 2), (2, 3), (2, 4)]).unwrap()
    }

    #[test]
    fn validate_examples() {
        let single = Poset::new(1, &[]).unwrap();
        assert!(single.order_pairs().is_empty());
        let chain = Poset::new(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(chain.order_pairs(), vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(
            Poset::new(3, &[(0, 1), (1, 2), (0, 2)]),
            Err(Error::NotReduced(0, 2))
        );
    }

    #[test]
    fn validate_errors() {
        assert_eq!(Poset::new(2, &[(0, 1), (1, 0)]).unwrap_err(), Error::Cycle(0));
        assert_eq!(Poset::new(2, &[(0, 0)]).unwrap_err(), Error::Cycle(0));
        assert_eq!(
            Poset::new(2, &[(0, 1), (0, 1)]).unwrap_err(),
            Error::DuplicateCover(0, 1)
        );
        assert_eq!(
            Poset::new(2, &[(0, 2)]).unwrap_err(),
            Error::IndexOutOfRange { element: 2, m: 2 }
        );
    }

    #[test]
    fn from_relation_reduces() {
        let p = Poset::from_relation(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(p.covers(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn heights() {
        assert_eq!(Poset::chain(3).height(), 3);
        assert_eq!(v_poset().height(), 2);
        assert_eq!(x_poset().height(), 3);
        assert_eq!(Poset::antichain(4).height(), 1);
    }

    #[test]
    fn tree_detection() {
        assert!(v_poset().is_tree());
        let butterfly = Poset::new(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        assert!(!butterfly.is_tree());
        assert!(!Poset::antichain(2).is_tree());
    }

    #[test]
    fn gradedness() {
        assert!(v_poset().is_graded());
        // a<b, a<c<d
        let p = Poset::new(4, &[(0, 1), (0, 2), (2, 3)]).unwrap();
        assert!(!p.is_graded());
        assert!(Poset::chain(4).is_graded());
        assert!(x_poset().is_graded());
    }

    #[test]
    fn chains_enumerated() {
        assert_eq!(v_poset().maximal_chains(), vec![vec![0, 1], vec![0, 2]]);
        assert_eq!(Poset::chain(3).maximal_chains(), vec![vec![0, 1, 2]]);
        let x = x_poset();
        assert_eq!(x.maximal_chains().len(), 4);
        assert_eq!(x.count_maximal_chains(), 4);
    }

    #[test]
    fn intervals() {
        assert_eq!(Poset::chain(3).interval(0, 2), vec![0, 1, 2]);
        assert!(v_poset().interval(1, 2).is_empty());
        assert_eq!(v_poset().interval(0, 1), vec![0, 1]);
    }

    #[test]
    fn duals() {
        let v = v_poset();
        let lambda = v.dual();
        assert_eq!(lambda.covers(), &[(1, 0), (2, 0)]);
        assert_eq!(lambda.dual(), v);
        assert!(Poset::chain(3).dual().is_isomorphic(&Poset::chain(3)));
    }

    #[test]
    fn leaf_orderings() {
        assert_eq!(v_poset().leaf_ordering(0).unwrap().order, vec![0, 1, 2]);
        let path = Poset::new(4, &[(1, 0), (2, 0), (2, 3)]).unwrap();
        assert_eq!(path.leaf_ordering(0).unwrap().order, vec![0, 1, 2, 3]);
        let chain = Poset::chain(3);
        let ord = chain.leaf_ordering(1).unwrap();
        assert_eq!(ord.order, vec![1, 0, 2]);
        assert!(ord.is_valid_for(&chain));
        let butterfly = Poset::new(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        assert_eq!(butterfly.leaf_ordering(0), Err(Error::NotTree));
    }

    #[test]
    fn induced_subposet_gets_new_covers() {
        // Removing the middle of a 3-chain leaves a 2-chain.
        let (sub, map) = Poset::chain(3).induced(&[0, 2]);
        assert_eq!(sub.covers(), &[(0, 1)]);
        assert_eq!(map, vec![0, 2]);
    }
}
