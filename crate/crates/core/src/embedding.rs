//! Weak containment of posets in set families.
//!
//! A family contains `P` when some injective map sends `a < b` in `P` to
//! `π(a) ⊊ π(b)`; incomparable elements may land on comparable sets. Since
//! proper inclusion is transitive, it is enough to preserve the covers.

use std::collections::{BTreeSet, HashMap};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::blowup::BlowupPoset;
use crate::copies::CopyFinder;
use crate::error::{Error, Result};
use crate::grading::GradedChainCover;
use crate::lattice::{is_proper_subset, set_size, MarkedChain, MaskSet, SetFamily};
use crate::poset::Poset;

/// An injective, order-preserving map from poset elements to sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Embedding {
    /// `assignment[e]` is the image of element `e`.
    pub assignment: Vec<u32>,
}

impl Embedding {
    /// Injective, order-preserving and landing inside `target`.
    pub fn is_valid(&self, p: &Poset, target: &SetFamily) -> bool {
        let img = &self.assignment;
        if img.len() != p.len() || !img.iter().all(|&m| target.contains(m)) {
            return false;
        }
        let distinct: BTreeSet<u32> = img.iter().copied().collect();
        distinct.len() == img.len()
            && p.covers().iter().all(|&(a, b)| is_proper_subset(img[a], img[b]))
    }
}

/// Search order: repeatedly take the smallest element adjacent to what has
/// been placed, starting a new component at the smallest unplaced element.
/// For a tree poset rooted at 0 this is its leaf ordering.
fn search_order(p: &Poset, root: usize) -> Vec<usize> {
    let hasse = p.hasse();
    let mut placed = vec![false; p.len()];
    let mut order = Vec::with_capacity(p.len());
    let mut frontier = BTreeSet::from([root]);
    while order.len() < p.len() {
        let v = match frontier.pop_first() {
            Some(v) => v,
            None => (0..p.len()).find(|&v| !placed[v]).unwrap(),
        };
        if placed[v] {
            continue;
        }
        placed[v] = true;
        order.push(v);
        frontier.extend(hasse.neighbors(v).iter().copied().filter(|&w| !placed[w]));
    }
    order
}

struct Plan {
    order: Vec<usize>,
    /// For each position: cover constraints to elements placed earlier, as
    /// (earlier element, whether the earlier one must be below).
    checks: Vec<Vec<(usize, bool)>>,
}

impl Plan {
    fn new(p: &Poset, root: usize) -> Self {
        let order = search_order(p, root);
        let mut pos = vec![0; p.len()];
        for (i, &e) in order.iter().enumerate() {
            pos[e] = i;
        }
        let checks = order
            .iter()
            .map(|&e| {
                let below = p.lower_covers(e).iter().filter(|&&w| pos[w] < pos[e]).map(|&w| (w, true));
                let above = p.upper_covers(e).iter().filter(|&&w| pos[w] < pos[e]).map(|&w| (w, false));
                below.chain(above).collect()
            })
            .collect();
        Plan { order, checks }
    }
}

/// Backtracking weak-containment tester for one pattern poset.
pub struct PosetMatcher<'p> {
    p: &'p Poset,
    up_need: Vec<usize>,
    down_need: Vec<usize>,
    plans: Vec<OnceLock<Plan>>,
}

impl<'p> PosetMatcher<'p> {
    pub fn new(p: &'p Poset) -> Self {
        PosetMatcher {
            p,
            up_need: (0..p.len()).map(|e| p.up_set(e).len()).collect(),
            down_need: (0..p.len()).map(|e| p.down_set(e).len()).collect(),
            plans: (0..p.len()).map(|_| OnceLock::new()).collect(),
        }
    }

    fn plan(&self, root: usize) -> &Plan {
        self.plans[root].get_or_init(|| Plan::new(self.p, root))
    }

    /// Some copy of `P` in `f`, if any.
    pub fn find(&self, f: &SetFamily) -> Option<Embedding> {
        if self.p.is_empty() {
            return Some(Embedding { assignment: Vec::new() });
        }
        self.search(f, None)
    }

    /// Some copy of `P` in `f` that uses the member `mask`.
    pub fn find_using(&self, f: &SetFamily, mask: u32) -> Option<Embedding> {
        if !f.contains(mask) {
            return None;
        }
        (0..self.p.len()).find_map(|e| self.search(f, Some((e, mask))))
    }

    fn search(&self, f: &SetFamily, pin: Option<(usize, u32)>) -> Option<Embedding> {
        let m = self.p.len();
        if f.len() < m {
            return None;
        }
        let members = f.members();
        // Supersets and subsets of each member inside the family.
        let mut sup = vec![0usize; members.len()];
        let mut sub = vec![0usize; members.len()];
        for (i, &a) in members.iter().enumerate() {
            for (j, &b) in members.iter().enumerate().skip(i + 1) {
                if is_proper_subset(a, b) {
                    sup[i] += 1;
                    sub[j] += 1;
                } else if is_proper_subset(b, a) {
                    sup[j] += 1;
                    sub[i] += 1;
                }
            }
        }
        let candidates: Vec<Vec<u32>> = (0..m)
            .map(|e| {
                members
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| sup[i] >= self.up_need[e] && sub[i] >= self.down_need[e])
                    .map(|(_, &mask)| mask)
                    .collect()
            })
            .collect();
        if let Some((e, mask)) = pin {
            if !candidates[e].contains(&mask) {
                return None;
            }
        }
        let plan = self.plan(pin.map_or(0, |(e, _)| e));
        let mut img = vec![u32::MAX; m];
        let mut used = HashMap::new();
        if self.extend(plan, 0, &candidates, pin, &mut img, &mut used) {
            Some(Embedding { assignment: img })
        } else {
            None
        }
    }

    fn extend(
        &self,
        plan: &Plan,
        depth: usize,
        candidates: &[Vec<u32>],
        pin: Option<(usize, u32)>,
        img: &mut [u32],
        used: &mut HashMap<u32, ()>,
    ) -> bool {
        if depth == plan.order.len() {
            return true;
        }
        let e = plan.order[depth];
        let checks = &plan.checks[depth];
        let try_mask = |mask: u32, img: &mut [u32], used: &mut HashMap<u32, ()>| -> bool {
            if used.contains_key(&mask) {
                return false;
            }
            let ok = checks.iter().all(|&(w, w_below)| {
                if w_below {
                    is_proper_subset(img[w], mask)
                } else {
                    is_proper_subset(mask, img[w])
                }
            });
            if !ok {
                return false;
            }
            img[e] = mask;
            used.insert(mask, ());
            if self.extend(plan, depth + 1, candidates, pin, img, used) {
                return true;
            }
            used.remove(&mask);
            false
        };
        match pin {
            Some((pe, mask)) if pe == e => try_mask(mask, img, used),
            _ => candidates[e].iter().any(|&mask| try_mask(mask, img, used)),
        }
    }
}

/// Some copy of `P` in `F`, found by backtracking along the search order.
pub fn contains_poset(f: &SetFamily, p: &Poset) -> Option<Embedding> {
    PosetMatcher::new(p).find(f)
}

pub fn is_p_free(f: &SetFamily, p: &Poset) -> bool {
    contains_poset(f, p).is_none()
}

/// The least copy of the blowup in `s` under the key order, or `None` if `s`
/// is free of it.
pub fn first_copy(s: &SetFamily, b: &BlowupPoset) -> Result<Option<Embedding>> {
    let finder = CopyFinder::new(b, s.n())?;
    Ok(finder
        .find(&MaskSet::from_family(s), None)
        .map(|assignment| Embedding { assignment }))
}

/// Which end of a chain the new interval occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Bottom,
    Top,
}

struct CoverStep {
    /// Ascending chain `C_j`.
    chain: Vec<usize>,
    /// Chain positions (0 = bottom) already embedded before step j.
    fixed: Vec<usize>,
    /// Chain positions of `I_j`.
    fresh: Vec<usize>,
    side: Side,
    /// `|∪_{i ≤ j} C_i|`.
    size_so_far: usize,
}

/// A successful marked-chain embedding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedEmbedding {
    pub embedding: Embedding,
    /// `used_chains[i]`: index into the marked-chain list whose markers are
    /// the image of `C_{i+1}`.
    pub used_chains: Vec<usize>,
    /// Chains pruned as bad when preparing each step `j = 2..=l`.
    pub pruned: Vec<usize>,
    /// The pruned lists left no embedding and the unpruned list was used.
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum MarkedOutcome {
    Embedded(MarkedEmbedding),
    /// The search never managed to extend past chain `C_chain` (1-based).
    Failed { chain: usize },
}

/// Node cap for the backtracking over chain choices.
const MARKED_SEARCH_BUDGET: u64 = 2_000_000;
/// Node cap for each witness search; exceeding it counts as "not a
/// bottleneck", which only keeps more chains.
const WITNESS_BUDGET: u64 = 200_000;

/// Embeds a graded poset chain by chain so that each `C_i` lands on the
/// marker set of a chain from `chains`.
///
/// Before extending to `C_j`, chains of the step-`j` list whose markers on
/// `C_j \ I_j` form a bottleneck are removed to give the list for earlier
/// steps. A bottleneck is a marker tuple for which a witness set of at most
/// `|C_1 ∪ ... ∪ C_j|` members of `F`, on the free side of the tuple and at
/// least `a` away in size, meets the free markers of every chain sharing
/// the tuple. If the pruned lists admit no embedding, the search is repeated
/// with the full list at every step.
pub fn embed_via_marked_chains(
    p: &Poset,
    cover: &GradedChainCover,
    f: &SetFamily,
    chains: &[MarkedChain],
    a: usize,
) -> Result<MarkedOutcome> {
    if !p.is_graded() {
        return Err(Error::NotGraded);
    }
    let k = p.height();
    for (index, chain) in chains.iter().enumerate() {
        chain
            .check(f, k, a)
            .map_err(|reason| Error::InvalidMarkedChain { index, reason })?;
    }
    let steps = plan_steps(p, cover, k)?;
    let markers: Vec<Vec<u32>> = chains.iter().map(MarkedChain::markers).collect();

    // Lists per step, top down: lists[j-1] serves step j.
    let l = steps.len();
    let mut lists: Vec<Vec<usize>> = vec![Vec::new(); l];
    let mut pruned = Vec::new();
    if l > 0 {
        lists[l - 1] = (0..chains.len()).collect();
        for j in (2..=l).rev() {
            let step = &steps[j - 1];
            let good = good_chains(&lists[j - 1], &markers, step, f, a, k);
            pruned.push(lists[j - 1].len() - good.len());
            lists[j - 2] = good;
        }
        pruned.reverse();
    }

    let mut search = MarkedSearch {
        steps: &steps,
        markers: &markers,
        k,
        img: vec![u32::MAX; p.len()],
        used_chains: Vec::new(),
        deepest: 0,
        nodes: 0,
    };
    if search.run(1, &lists) {
        return Ok(MarkedOutcome::Embedded(search.finish(pruned, false)));
    }
    let deepest_pruned = search.deepest;
    let full: Vec<Vec<usize>> = vec![(0..chains.len()).collect(); l];
    search.reset(p.len());
    if lists != full && search.run(1, &full) {
        return Ok(MarkedOutcome::Embedded(search.finish(pruned, true)));
    }
    Ok(MarkedOutcome::Failed { chain: search.deepest.max(deepest_pruned) + 1 })
}

fn plan_steps(p: &Poset, cover: &GradedChainCover, k: usize) -> Result<Vec<CoverStep>> {
    let mut steps = Vec::with_capacity(cover.len());
    let mut seen = vec![false; p.len()];
    let mut size = 0;
    for (idx, chain) in cover.chains.iter().enumerate() {
        if chain.len() != k || chain.iter().any(|&e| e >= p.len()) {
            return Err(Error::InvalidInput(format!("cover chain {} is not a maximal chain", idx + 1)));
        }
        let fresh: Vec<usize> = (0..k).filter(|&q| !seen[chain[q]]).collect();
        let fixed: Vec<usize> = (0..k).filter(|&q| seen[chain[q]]).collect();
        let side = if idx == 0 {
            Side::Bottom
        } else if fresh.is_empty() || fixed.is_empty() {
            return Err(Error::InvalidInput(format!(
                "cover chain {} must add a nonempty proper part",
                idx + 1
            )));
        } else if fresh == (0..fresh.len()).collect::<Vec<_>>() {
            Side::Bottom
        } else if fresh == (k - fresh.len()..k).collect::<Vec<_>>() {
            Side::Top
        } else {
            return Err(Error::InvalidInput(format!(
                "new part of cover chain {} is not at an end of the chain",
                idx + 1
            )));
        };
        for &e in chain {
            if !seen[e] {
                seen[e] = true;
                size += 1;
            }
        }
        steps.push(CoverStep { chain: chain.clone(), fixed, fresh, side, size_so_far: size });
    }
    if seen.iter().any(|&s| !s) {
        return Err(Error::InvalidInput("cover does not exhaust the poset".into()));
    }
    Ok(steps)
}

/// Marker index for chain position `q` (0 = bottom): position `q` carries
/// `F_{k-q}`, i.e. `markers[k - 1 - q]`.
fn marker_at(markers: &[u32], k: usize, q: usize) -> u32 {
    markers[k - 1 - q]
}

fn good_chains(
    list: &[usize],
    markers: &[Vec<u32>],
    step: &CoverStep,
    f: &SetFamily,
    a: usize,
    k: usize,
) -> Vec<usize> {
    let key_of = |c: usize| -> Vec<u32> {
        step.fixed.iter().map(|&q| marker_at(&markers[c], k, q)).collect()
    };
    let mut groups: HashMap<Vec<u32>, Vec<Vec<u32>>> = HashMap::new();
    for &c in list {
        let tail: Vec<u32> = step.fresh.iter().map(|&q| marker_at(&markers[c], k, q)).collect();
        groups.entry(key_of(c)).or_default().push(tail);
    }
    let mut bottleneck: HashMap<Vec<u32>, bool> = HashMap::new();
    list.iter()
        .copied()
        .filter(|&c| {
            let key = key_of(c);
            let bad = *bottleneck.entry(key.clone()).or_insert_with(|| {
                // The fixed marker nearest the fresh part bounds the pool.
                let edge = match step.side {
                    Side::Bottom => key[0],
                    Side::Top => *key.last().unwrap(),
                };
                let pool_ok = |x: u32| match step.side {
                    Side::Bottom => is_proper_subset(x, edge) && set_size(x) + a <= set_size(edge),
                    Side::Top => is_proper_subset(edge, x) && set_size(edge) + a <= set_size(x),
                };
                let tails: Vec<Vec<u32>> = groups[&key]
                    .iter()
                    .map(|t| t.iter().copied().filter(|&x| f.contains(x) && pool_ok(x)).collect())
                    .collect();
                find_witness(&tails, step.size_so_far).is_some()
            });
            !bad
        })
        .collect()
}

/// A set of at most `budget` sets meeting every tail, found by branching on
/// the first tail not yet met.
fn find_witness(tails: &[Vec<u32>], budget: usize) -> Option<Vec<u32>> {
    let mut chosen = Vec::new();
    let mut nodes = 0u64;
    fn go(tails: &[Vec<u32>], budget: usize, chosen: &mut Vec<u32>, nodes: &mut u64) -> Option<bool> {
        *nodes += 1;
        if *nodes > WITNESS_BUDGET {
            return None;
        }
        let unmet: Vec<&Vec<u32>> = tails
            .iter()
            .filter(|t| !t.iter().any(|x| chosen.contains(x)))
            .collect();
        let Some(first) = unmet.first() else {
            return Some(true);
        };
        // Pairwise disjoint unmet tails each need their own witness member.
        let mut packing: Vec<&Vec<u32>> = Vec::new();
        for t in &unmet {
            if packing.iter().all(|q| !q.iter().any(|x| t.contains(x))) {
                packing.push(t);
            }
        }
        if chosen.len() + packing.len() > budget {
            return Some(false);
        }
        let mut options = (*first).clone();
        options.sort_unstable();
        for x in options {
            chosen.push(x);
            match go(tails, budget, chosen, nodes) {
                Some(true) => return Some(true),
                None => return None,
                Some(false) => {}
            }
            chosen.pop();
        }
        Some(false)
    }
    match go(tails, budget, &mut chosen, &mut nodes) {
        Some(true) => {
            chosen.sort_unstable();
            Some(chosen)
        }
        _ => None,
    }
}

struct MarkedSearch<'s> {
    steps: &'s [CoverStep],
    markers: &'s [Vec<u32>],
    k: usize,
    img: Vec<u32>,
    used_chains: Vec<usize>,
    deepest: usize,
    nodes: u64,
}

impl MarkedSearch<'_> {
    fn reset(&mut self, m: usize) {
        self.img = vec![u32::MAX; m];
        self.used_chains.clear();
        self.nodes = 0;
    }

    fn finish(&self, pruned: Vec<usize>, fallback: bool) -> MarkedEmbedding {
        MarkedEmbedding {
            embedding: Embedding { assignment: self.img.clone() },
            used_chains: self.used_chains.clone(),
            pruned,
            fallback,
        }
    }

    /// Embeds steps `j..=l` given steps before `j` are in place.
    fn run(&mut self, j: usize, lists: &[Vec<usize>]) -> bool {
        if j > self.steps.len() {
            return true;
        }
        let step = &self.steps[j - 1];
        for &c in &lists[j - 1] {
            self.nodes += 1;
            if self.nodes > MARKED_SEARCH_BUDGET {
                return false;
            }
            let marks = &self.markers[c];
            let fits = step
                .fixed
                .iter()
                .all(|&q| marker_at(marks, self.k, q) == self.img[step.chain[q]]);
            let fresh_ok = step.fresh.iter().all(|&q| {
                let x = marker_at(marks, self.k, q);
                !self.img.contains(&x)
            });
            if !fits || !fresh_ok {
                continue;
            }
            for &q in &step.fresh {
                self.img[step.chain[q]] = marker_at(marks, self.k, q);
            }
            self.used_chains.push(c);
            self.deepest = self.deepest.max(j);
            if self.run(j + 1, lists) {
                return true;
            }
            self.used_chains.pop();
            for &q in &step.fresh {
                self.img[step.chain[q]] = u32::MAX;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blowup::blowup;
    use crate::grading::graded_chain_cover;
    use crate::lattice::enumerate_marked_chains;

    fn v_poset() -> Poset {
        Poset::new(3, &[(0, 1), (0, 2)]).unwrap()
    }

    fn butterfly() -> Poset {
        Poset::new(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap()
    }

    #[test]
    fn weak_containment_examples() {
        let f = SetFamily::new(2, [0, 1, 3]).unwrap();
        let e = contains_poset(&f, &v_poset()).unwrap();
        assert!(e.is_valid(&v_poset(), &f));
        assert_eq!(e.assignment[0], 0);

        let antichain = SetFamily::layer(4, 2);
        assert!(is_p_free(&antichain, &Poset::chain(2)));

        // Two bottoms below two tops needs four sets; 2^[2] has a chain
        // through every pair of distinct proper-inclusion-related sets, yet
        // {1} and {2} share only one proper superset.
        let f = SetFamily::full(2);
        assert!(is_p_free(&f, &butterfly()));
        let f = SetFamily::full(3);
        assert!(!is_p_free(&f, &butterfly()));
    }

    #[test]
    fn chain_in_chain() {
        let f = SetFamily::new(3, [0, 1, 3, 7]).unwrap();
        assert!(!is_p_free(&f, &Poset::chain(4)));
        assert!(is_p_free(&f, &Poset::chain(5)));
    }

    #[test]
    fn layers_are_free_of_taller_trees() {
        let v = v_poset();
        for n in 1..=6 {
            for lo in 0..=n {
                assert!(is_p_free(&SetFamily::layer(n, lo), &v));
            }
        }
    }

    #[test]
    fn find_using_respects_mask() {
        let f = SetFamily::new(2, [0, 1, 3]).unwrap();
        let p = Poset::chain(2);
        let m = PosetMatcher::new(&p);
        let e = m.find_using(&f, 3).unwrap();
        assert!(e.assignment.contains(&3));
        assert!(m.find_using(&f, 2).is_none());
    }

    #[test]
    fn first_copy_of_fork() {
        let fork = blowup(&Poset::chain(2), 0, 2).unwrap();
        let e = first_copy(&SetFamily::full(2), &fork).unwrap().unwrap();
        assert_eq!(e.assignment, vec![0, 1, 2]);
        let s = SetFamily::new(2, [1, 2, 3]).unwrap();
        assert!(first_copy(&s, &fork).unwrap().is_none());
    }

    #[test]
    fn marked_embedding_chain_base_case() {
        let p = Poset::chain(2);
        let cover = graded_chain_cover(&p).unwrap();
        let f = SetFamily::full(2);
        let chains = enumerate_marked_chains(&f, 2, 1).unwrap();
        let MarkedOutcome::Embedded(e) = embed_via_marked_chains(&p, &cover, &f, &chains, 1).unwrap() else {
            panic!("expected an embedding");
        };
        assert!(e.embedding.is_valid(&p, &f));
    }

    #[test]
    fn marked_embedding_v() {
        let p = v_poset();
        let cover = graded_chain_cover(&p).unwrap();
        let f = SetFamily::full(2);
        let chains = enumerate_marked_chains(&f, 2, 1).unwrap();
        assert_eq!(chains.len(), 6);
        let out = embed_via_marked_chains(&p, &cover, &f, &chains, 1).unwrap();
        let MarkedOutcome::Embedded(e) = out else {
            panic!("expected an embedding, got {out:?}");
        };
        assert!(e.embedding.is_valid(&p, &f));
        for (i, &c) in e.used_chains.iter().enumerate() {
            let mut imgs: Vec<u32> = cover.chains[i].iter().map(|&x| e.embedding.assignment[x]).collect();
            let mut marks = chains[c].markers();
            imgs.sort_unstable();
            marks.sort_unstable();
            assert_eq!(imgs, marks);
        }
    }

    #[test]
    fn marked_embedding_empty_list_fails_at_first_chain() {
        let p = v_poset();
        let cover = graded_chain_cover(&p).unwrap();
        let out = embed_via_marked_chains(&p, &cover, &SetFamily::full(2), &[], 1).unwrap();
        assert_eq!(out, MarkedOutcome::Failed { chain: 1 });
    }

    #[test]
    fn marked_embedding_rejects_bad_chain() {
        let p = Poset::chain(2);
        let cover = graded_chain_cover(&p).unwrap();
        let f = SetFamily::new(2, [0, 3]).unwrap();
        let bad = MarkedChain { perm: vec![0, 1], marker_sizes: vec![2, 1] };
        assert!(matches!(
            embed_via_marked_chains(&p, &cover, &f, &[bad], 1),
            Err(Error::InvalidMarkedChain { index: 0, .. })
        ));
    }

    #[test]
    fn witness_search() {
        let tails = vec![vec![1, 2], vec![2, 3], vec![4]];
        assert_eq!(find_witness(&tails, 2), Some(vec![2, 4]));
        assert_eq!(find_witness(&tails, 1), None);
        assert_eq!(find_witness(&[], 0), Some(vec![]));
    }
}
