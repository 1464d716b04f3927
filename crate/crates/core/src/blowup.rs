//! The t-blowup `P(x, t)` of a tree poset.
//!
//! Element `x_i` of the leaf ordering (rooted at `x`) is replaced by
//! `t^d(x_i)` copies `x_{i,1}, x_{i,2}, ...`, where `d` is the Hasse distance
//! to `x`. For `i > 1` the copies are cut into consecutive groups
//! `V_{i,k} = {x_{i,(k-1)t+1}, ..., x_{i,kt}}`, and every member of `V_{i,k}`
//! is joined to `x_{j,k}`, the `k`-th copy of the Hasse neighbour `x_j` of
//! `x_i` that is closer to the root. The edge keeps its direction: when `x_i`
//! covers `x_j`, the whole group sits above `x_{j,k}`.
//!
//! Blowup elements are numbered in the lexicographic order of their labels
//! `(i, r)`, so the element index *is* the position in that order.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::poset::{LeafOrdering, Poset};

/// Which way a group hangs off its attachment point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// The group lies above the attachment point.
    Above,
    /// The group lies below the attachment point.
    Below,
}

/// Label `(i, r)` of the copy `x_{i,r}`; both coordinates are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CopyLabel {
    pub i: usize,
    pub r: usize,
    /// The element of the original poset this is a copy of.
    pub source: usize,
}

#[derive(Debug, Clone)]
pub struct BlowupPoset {
    base: Poset,
    source: Poset,
    ordering: LeafOrdering,
    t: usize,
    labels: Vec<CopyLabel>,
    /// Per ordering position: Hasse distance to the root.
    depth: Vec<usize>,
    /// Per ordering position: position of the attachment neighbour.
    parent: Vec<Option<usize>>,
    /// Per ordering position: side of the attachment neighbour.
    direction: Vec<Direction>,
    /// Per ordering position: first element index of its copies.
    offset: Vec<usize>,
    count: Vec<usize>,
}

/// `Σ_i t^{d(x_i)}` for the tree poset `p` rooted at `root`, saturating.
pub fn blowup_size(p: &Poset, root: usize, t: usize) -> Result<u128> {
    if root >= p.len() {
        return Err(Error::IndexOutOfRange { element: root, m: p.len() });
    }
    let hasse = p.hasse();
    if !hasse.is_tree() {
        return Err(Error::NotTree);
    }
    let size = hasse
        .distances_from(root)
        .into_iter()
        .map(|d| saturating_pow(t as u128, d.expect("trees are connected")))
        .fold(0u128, u128::saturating_add);
    let m = p.len() as u128;
    if t >= 1 {
        debug_assert!(size <= m.saturating_mul(saturating_pow(t as u128, p.len() - 1)));
    }
    Ok(size)
}

fn saturating_pow(base: u128, exp: usize) -> u128 {
    let mut acc = 1u128;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}

/// Blowup rooted at `root` with the default leaf ordering and size cap.
pub fn blowup(p: &Poset, root: usize, t: usize) -> Result<BlowupPoset> {
    let ordering = p.leaf_ordering(root)?;
    BlowupPoset::build(p, &ordering, t, Caps::from_env()?.blowup)
}

impl BlowupPoset {
    pub fn build(p: &Poset, ordering: &LeafOrdering, t: usize, cap: u128) -> Result<Self> {
        if t == 0 {
            return Err(Error::Domain("blowup factor t must be at least 1".into()));
        }
        if !p.is_tree() {
            return Err(Error::NotTree);
        }
        if !ordering.is_valid_for(p) {
            return Err(Error::InvalidInput(
                "ordering is not a leaf ordering of the poset".into(),
            ));
        }
        let size = blowup_size(p, ordering.root, t)?;
        if size > cap {
            return Err(Error::Size { what: "blowup", size, cap });
        }

        let m = p.len();
        let pos = ordering.positions();
        let hasse = p.hasse();
        let dist = hasse.distances_from(ordering.root);
        let mut depth = Vec::with_capacity(m);
        let mut parent = Vec::with_capacity(m);
        let mut direction = Vec::with_capacity(m);
        let mut offset = Vec::with_capacity(m);
        let mut count = Vec::with_capacity(m);
        let mut labels = Vec::with_capacity(size as usize);
        let mut covers = Vec::with_capacity(size as usize);

        for (i, &xi) in ordering.order.iter().enumerate() {
            let d = dist[xi].unwrap();
            let copies = t.pow(d as u32);
            depth.push(d);
            offset.push(labels.len());
            count.push(copies);
            if i == 0 {
                parent.push(None);
                direction.push(Direction::Above);
            } else {
                let xj = *hasse
                    .neighbors(xi)
                    .iter()
                    .find(|&&w| dist[w] == Some(d - 1))
                    .expect("a non-root tree vertex has a neighbour closer to the root");
                let j = pos[xj];
                debug_assert!(j < i);
                let dir = if p.covers_pair(xj, xi) {
                    Direction::Above
                } else {
                    Direction::Below
                };
                parent.push(Some(j));
                direction.push(dir);
                for r in 1..=copies {
                    let k = (r - 1) / t + 1;
                    let child = labels.len() + r - 1;
                    let anchor = offset[j] + k - 1;
                    covers.push(match dir {
                        Direction::Above => (anchor, child),
                        Direction::Below => (child, anchor),
                    });
                }
            }
            labels.extend((1..=copies).map(|r| CopyLabel { i: i + 1, r, source: xi }));
        }

        Ok(BlowupPoset {
            base: Poset::from_trusted(labels.len(), covers),
            source: p.clone(),
            ordering: ordering.clone(),
            t,
            labels,
            depth,
            parent,
            direction,
            offset,
            count,
        })
    }

    /// The blowup as a plain poset.
    pub fn poset(&self) -> &Poset {
        &self.base
    }

    /// The poset that was blown up.
    pub fn source(&self) -> &Poset {
        &self.source
    }

    pub fn ordering(&self) -> &LeafOrdering {
        &self.ordering
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of elements in the original poset.
    pub fn source_len(&self) -> usize {
        self.ordering.order.len()
    }

    pub fn label(&self, e: usize) -> CopyLabel {
        self.labels[e]
    }

    pub fn labels(&self) -> &[CopyLabel] {
        &self.labels
    }

    /// Element index of `x_{i,r}` (1-based coordinates).
    pub fn copy(&self, i: usize, r: usize) -> usize {
        assert!(r >= 1 && r <= self.count[i - 1], "copy index out of range");
        self.offset[i - 1] + r - 1
    }

    /// Number of copies of `x_i`.
    pub fn copy_count(&self, i: usize) -> usize {
        self.count[i - 1]
    }

    /// Hasse distance from the root to `x_i`.
    pub fn depth(&self, i: usize) -> usize {
        self.depth[i - 1]
    }

    /// For `i > 1`: ordering position `j` of the neighbour `x_i` hangs off,
    /// and on which side of it the copies of `x_i` sit.
    pub fn attachment(&self, i: usize) -> Option<(usize, Direction)> {
        self.parent[i - 1].map(|j| (j + 1, self.direction[i - 1]))
    }

    /// Elements of the group `V_{i,k}` (1-based), a contiguous index range.
    pub fn group(&self, i: usize, k: usize) -> Range<usize> {
        assert!(i >= 2, "the root has no groups");
        let start = self.offset[i - 1] + (k - 1) * self.t;
        start..start + self.t
    }

    /// Number of groups of `x_i`, i.e. `t^{d(x_i) - 1}`.
    pub fn group_count(&self, i: usize) -> usize {
        if i == 1 {
            0
        } else {
            self.count[i - 1] / self.t
        }
    }

    /// The blowup element a non-root element hangs off.
    pub fn anchor_of(&self, e: usize) -> Option<usize> {
        let CopyLabel { i, r, .. } = self.labels[e];
        self.parent[i - 1].map(|j| self.offset[j] + (r - 1) / self.t)
    }

    /// Lexicographic order on labels. Element indices already follow it.
    pub fn lex_order(&self) -> Vec<usize> {
        (0..self.len()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hanging_path() -> Poset {
        Poset::new(4, &[(1, 0), (2, 0), (2, 3)]).unwrap()
    }

    #[test]
    fn path_blowup_layout() {
        let b = blowup(&hanging_path(), 0, 2).unwrap();
        assert_eq!(b.len(), 9);
        let counts: Vec<usize> = (1..=4).map(|i| b.copy_count(i)).collect();
        assert_eq!(counts, vec![1, 2, 2, 4]);
        // x_{1,1} sits above all four copies of x_2 and x_3.
        let top = b.copy(1, 1);
        for i in [2, 3] {
            for r in 1..=2 {
                assert!(b.poset().covers_pair(b.copy(i, r), top));
            }
        }
        // x_{4,1}, x_{4,2} above x_{3,1}; x_{4,3}, x_{4,4} above x_{3,2}.
        assert_eq!(b.group(4, 1), b.copy(4, 1)..b.copy(4, 2) + 1);
        for (k, anchor) in [(1, b.copy(3, 1)), (2, b.copy(3, 2))] {
            for e in b.group(4, k) {
                assert!(b.poset().covers_pair(anchor, e));
                assert_eq!(b.anchor_of(e), Some(anchor));
            }
        }
        assert!(b.poset().is_tree());
        assert_eq!(b.poset().covers().len(), 8);
    }

    #[test]
    fn identity_blowup() {
        let p = hanging_path();
        let b = blowup(&p, 0, 1).unwrap();
        assert!(b.poset().is_isomorphic(&p));
    }

    #[test]
    fn chain_blowup_is_a_fork() {
        let b = blowup(&Poset::chain(2), 0, 3).unwrap();
        let fork = Poset::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert!(b.poset().is_isomorphic(&fork));
    }

    #[test]
    fn sizes() {
        assert_eq!(blowup_size(&hanging_path(), 0, 2).unwrap(), 9);
        assert_eq!(blowup_size(&hanging_path(), 0, 1).unwrap(), 4);
        let star = Poset::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(blowup_size(&star, 0, 2).unwrap(), 7);
        assert_eq!(blowup(&star, 0, 2).unwrap().len(), 7);
    }

    #[test]
    fn errors() {
        let butterfly = Poset::new(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        assert_eq!(blowup(&butterfly, 0, 2).unwrap_err(), Error::NotTree);
        let p = Poset::chain(6);
        let ord = p.leaf_ordering(0).unwrap();
        assert!(matches!(
            BlowupPoset::build(&p, &ord, 10, 1000),
            Err(Error::Size { .. })
        ));
        assert!(matches!(blowup(&p, 0, 0), Err(Error::Domain(_))));
    }
}
