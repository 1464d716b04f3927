//! The least copy of a blowup inside a family.
//!
//! Copies are compared by a key: the images of the internal elements (the
//! root and every copy of a non-leaf of the rooted tree) in blowup element
//! order, followed by the images of the leaf copies in element order. The
//! least key is found by branching over internal elements only. Leaf copies
//! hanging off the same anchor form a group of `t` interchangeable slots, so
//! they are handled by a bipartite b-matching from leaf groups to sets that
//! is kept up to date as internal elements are placed.

use std::ops::Range;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::blowup::{BlowupPoset, Direction};
use crate::error::{Error, Result};
use crate::lattice::MaskSet;

/// Proper-superset and proper-subset bitmaps for every subset of `[n]`.
pub(crate) struct RelationTables {
    words: usize,
    sup: Vec<u64>,
    sub: Vec<u64>,
}

/// Largest ground set for the blowup copy search.
pub const COPY_SEARCH_MAX_N: usize = 12;

impl RelationTables {
    fn build(n: usize) -> Self {
        let size = 1usize << n;
        let words = size.div_ceil(64);
        let mut sup = vec![0u64; size * words];
        let mut sub = vec![0u64; size * words];
        for a in 0..size {
            let rest = !a & (size - 1);
            // Proper supersets: a | s for nonempty submasks s of the complement.
            let mut s = rest;
            while s != 0 {
                let b = a | s;
                sup[a * words + (b >> 6)] |= 1 << (b & 63);
                sub[b * words + (a >> 6)] |= 1 << (a & 63);
                s = (s - 1) & rest;
            }
        }
        RelationTables { words, sup, sub }
    }

    pub(crate) fn get(n: usize) -> &'static RelationTables {
        static TABLES: [OnceLock<RelationTables>; COPY_SEARCH_MAX_N + 1] =
            [const { OnceLock::new() }; COPY_SEARCH_MAX_N + 1];
        TABLES[n].get_or_init(|| RelationTables::build(n))
    }

    fn row(&self, side: Direction, mask: u32) -> &[u64] {
        let start = mask as usize * self.words;
        match side {
            Direction::Above => &self.sup[start..start + self.words],
            Direction::Below => &self.sub[start..start + self.words],
        }
    }
}

fn has(words: &[u64], v: u32) -> bool {
    words[(v >> 6) as usize] >> (v & 63) & 1 == 1
}

fn set(words: &mut [u64], v: u32) {
    words[(v >> 6) as usize] |= 1 << (v & 63);
}

fn unset(words: &mut [u64], v: u32) {
    words[(v >> 6) as usize] &= !(1 << (v & 63));
}

/// Calls `f` on every bit of `a & b` at or above `from`, ascending, until it
/// returns true.
fn any_bit(a: &[u64], b: &[u64], from: u32, mut f: impl FnMut(u32) -> bool) -> bool {
    let mut w = (from >> 6) as usize;
    let mut first = true;
    while w < a.len() {
        let mut bits = a[w] & b[w];
        if first {
            bits &= !0u64 << (from & 63);
            first = false;
        }
        while bits != 0 {
            let v = (w as u32) << 6 | bits.trailing_zeros();
            bits &= bits - 1;
            if f(v) {
                return true;
            }
        }
        w += 1;
    }
    false
}

struct LeafGroup {
    anchor: usize,
    side: Direction,
    members: Range<usize>,
}

/// Leaf groups matched to sets. `owner[v]` is the group holding set `v`
/// plus one (zero when free); `avail` holds the sets leaves may still move
/// between: inside the family, not an internal image, not committed.
#[derive(Clone)]
struct Flow {
    avail: Vec<u64>,
    owner: Vec<u32>,
    load: Vec<usize>,
}

/// Statistics of one search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
}

pub struct CopyFinder<'b> {
    b: &'b BlowupPoset,
    n: usize,
    tables: &'static RelationTables,
    /// Per blowup element: ordering position (0-based) of its source.
    kind: Vec<usize>,
    /// Per blowup element: attachment element and side.
    anchor: Vec<Option<(usize, Direction)>>,
    /// Per blowup element: members of its group still to come after it.
    later_in_group: Vec<usize>,
    /// Per ordering position: child positions and their side.
    children: Vec<Vec<(usize, Direction)>>,
    internal: Vec<usize>,
    leaves: Vec<usize>,
    groups: Vec<LeafGroup>,
    /// Per element: leaf groups hanging off it.
    groups_at: Vec<Vec<usize>>,
    /// Per element: its leaf group, if it is a leaf.
    group_of: Vec<Option<usize>>,
    /// Per internal element: how many sets must still fit strictly above
    /// and strictly below its image once the earlier internal elements are
    /// placed.
    room: Vec<(usize, usize)>,
}

impl<'b> CopyFinder<'b> {
    pub fn new(b: &'b BlowupPoset, n: usize) -> Result<Self> {
        if n > COPY_SEARCH_MAX_N {
            return Err(Error::TooLarge { what: "blowup copy search", n, cap: COPY_SEARCH_MAX_N });
        }
        let m = b.source_len();
        let t = b.t();
        let mut children = vec![Vec::new(); m];
        for i in 2..=m {
            let (j, side) = b.attachment(i).unwrap();
            children[j - 1].push((i - 1, side));
        }
        let kind: Vec<usize> = b.labels().iter().map(|l| l.i - 1).collect();
        let anchor = (0..b.len())
            .map(|e| {
                let i = b.label(e).i;
                b.anchor_of(e).map(|a| (a, b.attachment(i).unwrap().1))
            })
            .collect();
        let later_in_group = b
            .labels()
            .iter()
            .map(|l| if l.i == 1 { 0 } else { t - 1 - (l.r - 1) % t })
            .collect();
        let is_leaf = |e: usize| e != 0 && children[kind[e]].is_empty();
        let internal: Vec<usize> = (0..b.len()).filter(|&e| !is_leaf(e)).collect();
        let leaves: Vec<usize> = (0..b.len()).filter(|&e| is_leaf(e)).collect();
        let mut groups = Vec::new();
        let mut groups_at = vec![Vec::new(); b.len()];
        let mut group_of = vec![None; b.len()];
        for i in 2..=m {
            if !children[i - 1].is_empty() {
                continue;
            }
            let (j, side) = b.attachment(i).unwrap();
            for k in 1..=b.group_count(i) {
                let members = b.group(i, k);
                let anchor = b.copy(j, k);
                for e in members.clone() {
                    group_of[e] = Some(groups.len());
                }
                groups_at[anchor].push(groups.len());
                groups.push(LeafGroup { anchor, side, members });
            }
        }
        let q = b.poset();
        let reach = |e: usize, up: bool| {
            let mut seen = vec![false; q.len()];
            let mut stack = vec![e];
            while let Some(x) = stack.pop() {
                let next = if up { q.upper_covers(x) } else { q.lower_covers(x) };
                for &y in next {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            seen
        };
        let mut room = vec![(0, 0); b.len()];
        for (pos, &e) in internal.iter().enumerate() {
            let placed = &internal[..pos];
            let left = |seen: Vec<bool>| {
                seen.iter().filter(|&&x| x).count() - placed.iter().filter(|&&f| seen[f]).count()
            };
            room[e] = (left(reach(e, true)), left(reach(e, false)));
        }
        Ok(CopyFinder {
            b,
            n,
            tables: RelationTables::get(n),
            kind,
            anchor,
            later_in_group,
            children,
            internal,
            leaves,
            groups,
            groups_at,
            group_of,
            room,
        })
    }

    fn feasibility(&self, g: &MaskSet) -> Vec<Vec<u64>> {
        let m = self.b.source_len();
        let t = self.b.t();
        let mut feas = vec![Vec::new(); m];
        for i in (0..m).rev() {
            let mut words = g.words().to_vec();
            if !self.children[i].is_empty() {
                for c in g.iter() {
                    let ok = self.children[i].iter().all(|&(j, side)| {
                        let row = self.tables.row(side, c);
                        let mut count = 0usize;
                        for (w, f) in row.iter().zip(&feas[j]) {
                            count += (w & f).count_ones() as usize;
                            if count >= t {
                                return true;
                            }
                        }
                        false
                    });
                    if !ok {
                        unset(&mut words, c);
                    }
                }
            }
            feas[i] = words;
        }
        feas
    }

    /// Number of internal elements, the length of the key prefix a resumed
    /// search compares against.
    pub fn internal_len(&self) -> usize {
        self.internal.len()
    }

    /// Images listed in key order: internal elements, then leaves.
    pub fn key(&self, assignment: &[u32]) -> Vec<u32> {
        self.internal.iter().chain(&self.leaves).map(|&e| assignment[e]).collect()
    }

    /// The least copy inside `g` whose key is at least the key of `from`,
    /// as images per blowup element.
    pub fn find(&self, g: &MaskSet, from: Option<&[u32]>) -> Option<Vec<u32>> {
        self.find_with_stats(g, from).0
    }

    /// Like [`CopyFinder::find`]. When `from` is given, only its internal
    /// images are used as a lower bound, which is all the container loop
    /// needs: the least key never decreases as the family shrinks.
    pub fn find_with_stats(&self, g: &MaskSet, from: Option<&[u32]>) -> (Option<Vec<u32>>, SearchStats) {
        assert_eq!(g.n(), self.n, "ground set mismatch");
        let mut stats = SearchStats::default();
        if g.len() < self.b.len() {
            return (None, stats);
        }
        let feas = self.feasibility(g);
        if feas[0].iter().all(|&w| w == 0) {
            return (None, stats);
        }
        let bound: Option<Vec<u32>> = from.map(|a| self.internal.iter().map(|&e| a[e]).collect());
        let mut flow = Flow {
            avail: g.words().to_vec(),
            owner: vec![0; 1 << self.n],
            load: vec![0; self.groups.len()],
        };
        let mut img = vec![0u32; self.b.len()];
        let mut used = vec![0u64; g.words().len()];
        let found = self.dfs(0, bound.as_deref(), g.words(), &feas, &mut img, &mut used, &mut flow, &mut stats);
        (found.then_some(img), stats)
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        idx: usize,
        bound: Option<&[u32]>,
        g: &[u64],
        feas: &[Vec<u64>],
        img: &mut [u32],
        used: &mut [u64],
        flow: &mut Flow,
        stats: &mut SearchStats,
    ) -> bool {
        stats.nodes += 1;
        if idx == self.internal.len() {
            return self.place_leaves(img, flow, stats);
        }
        let e = self.internal[idx];
        let words = used.len();
        let mut cand = vec![0u64; words];
        match self.anchor[e] {
            None => cand.copy_from_slice(&feas[self.kind[e]]),
            Some((a, side)) => {
                let row = self.tables.row(side, img[a]);
                for w in 0..words {
                    cand[w] = row[w] & feas[self.kind[e]][w];
                }
            }
        }
        for w in 0..words {
            cand[w] &= !used[w];
        }
        let mut start = 0u32;
        if self.anchor[e].is_some() && self.later_in_group[e] + 1 < self.b.t() {
            start = img[e - 1] + 1;
        }
        let tight = bound.map(|lb| lb[idx]);
        if let Some(lb) = tight {
            start = start.max(lb);
        }
        let need_after = self.later_in_group[e];
        let all = vec![!0u64; words];
        let mut options = Vec::new();
        any_bit(&cand, &all, start, |v| {
            options.push(v);
            false
        });
        let usable = options.len().saturating_sub(need_after);
        let (up, down) = self.room[e];
        let fits = |side, v: u32, need: usize| {
            need == 0 || {
                let row = self.tables.row(side, v);
                let mut count = 0;
                (0..words).any(|w| {
                    count += (row[w] & g[w] & !used[w]).count_ones() as usize;
                    count >= need
                })
            }
        };
        let options: Vec<u32> = options[..usable]
            .iter()
            .copied()
            .filter(|&v| fits(Direction::Above, v, up) && fits(Direction::Below, v, down))
            .collect();
        for &v in &options {
            let saved = flow.clone();
            img[e] = v;
            set(used, v);
            let next_bound = match (bound, tight) {
                (Some(lb), Some(x)) if x == v => Some(lb),
                _ => None,
            };
            let ok = self.claim_for_internal(v, img, flow, stats)
                && self.groups_at[e]
                    .iter()
                    .all(|&gi| (0..self.b.t()).all(|_| self.augment(gi, img, flow, stats)))
                && self.siblings_fit(e, v, &cand, img, used, flow, stats)
                && self.dfs(idx + 1, next_bound, g, feas, img, used, flow, stats);
            if ok {
                return true;
            }
            *flow = saved;
            unset(used, v);
        }
        false
    }

    /// Relaxed check for the siblings still to come after `e`: they need
    /// images among the remaining candidates and their leaf children need
    /// sets above or below some candidate, competing with the matched
    /// leaves.
    #[allow(clippy::too_many_arguments)]
    fn siblings_fit(
        &self,
        e: usize,
        v: u32,
        cand: &[u64],
        img: &[u32],
        used: &[u64],
        flow: &Flow,
        stats: &mut SearchStats,
    ) -> bool {
        let rest = self.later_in_group[e];
        if rest == 0 {
            return true;
        }
        let words = used.len();
        let mut sib = vec![0u64; words];
        let all = vec![!0u64; words];
        any_bit(cand, &all, v + 1, |u| {
            if !has(used, u) {
                set(&mut sib, u);
            }
            false
        });
        let mut extra = vec![sib];
        let mut demand = vec![rest];
        for &(c, side) in &self.children[self.kind[e]] {
            if !self.children[c].is_empty() {
                continue;
            }
            let mut reach = vec![0u64; words];
            any_bit(&extra[0], &all, 0, |u| {
                for (r, w) in reach.iter_mut().zip(self.tables.row(side, u)) {
                    *r |= w;
                }
                false
            });
            extra.push(reach);
            demand.push(rest * self.b.t());
        }
        let mut trial = flow.clone();
        trial.load.resize(self.groups.len() + extra.len(), 0);
        let real = self.groups.len();
        demand
            .iter()
            .enumerate()
            .all(|(k, &d)| (0..d).all(|_| self.augment_with(real + k, img, &mut trial, &extra, stats)))
    }

    /// Takes set `v` out of the leaves' reach, rerouting its leaf group.
    fn claim_for_internal(&self, v: u32, img: &[u32], flow: &mut Flow, stats: &mut SearchStats) -> bool {
        unset(&mut flow.avail, v);
        let holder = flow.owner[v as usize];
        if holder == 0 {
            return true;
        }
        flow.owner[v as usize] = 0;
        flow.load[holder as usize - 1] -= 1;
        self.augment(holder as usize - 1, img, flow, stats)
    }

    /// One augmenting path giving group `start` an extra set.
    fn augment(&self, start: usize, img: &[u32], flow: &mut Flow, stats: &mut SearchStats) -> bool {
        self.augment_with(start, img, flow, &[], stats)
    }

    /// Augmenting path search where groups past the real ones draw from the
    /// fixed rows in `extra`.
    fn augment_with(
        &self,
        start: usize,
        img: &[u32],
        flow: &mut Flow,
        extra: &[Vec<u64>],
        stats: &mut SearchStats,
    ) -> bool {
        stats.nodes += 1;
        let real = self.groups.len();
        let ng = real + extra.len();
        let mut parent = vec![usize::MAX; ng];
        // Set group h takes over from its parent along the path.
        let mut via = vec![u32::MAX; ng];
        let mut seen = vec![false; ng];
        seen[start] = true;
        let mut queue = vec![start];
        let mut head = 0;
        while head < queue.len() {
            let h = queue[head];
            head += 1;
            let row = match self.groups.get(h) {
                Some(grp) => self.tables.row(grp.side, img[grp.anchor]),
                None => &extra[h - real],
            };
            let mut free = None;
            any_bit(row, &flow.avail, 0, |v| {
                let o = flow.owner[v as usize];
                if o == 0 {
                    free = Some(v);
                    return true;
                }
                let o = o as usize - 1;
                if !seen[o] {
                    seen[o] = true;
                    parent[o] = h;
                    via[o] = v;
                    queue.push(o);
                }
                false
            });
            if let Some(mut v) = free {
                // Walk back: h takes v, gives via[h] to parent[h], ...
                let mut h = h;
                loop {
                    flow.owner[v as usize] = h as u32 + 1;
                    if h == start {
                        flow.load[start] += 1;
                        return true;
                    }
                    v = via[h];
                    h = parent[h];
                }
            }
        }
        false
    }

    /// With all internal elements placed and every leaf group matched,
    /// fixes leaf images one at a time, each as small as the matching
    /// allows.
    fn place_leaves(&self, img: &mut [u32], flow: &mut Flow, stats: &mut SearchStats) -> bool {
        for &e in &self.leaves {
            let gi = self.group_of[e].unwrap();
            let grp = &self.groups[gi];
            let from = if e == grp.members.start { 0 } else { img[e - 1] + 1 };
            let row = self.tables.row(grp.side, img[grp.anchor]);
            let avail = flow.avail.clone();
            let mut chosen = None;
            any_bit(row, &avail, from, |v| {
                stats.nodes += 1;
                if self.commit(gi, v, img, flow, stats) {
                    chosen = Some(v);
                    true
                } else {
                    false
                }
            });
            match chosen {
                Some(v) => img[e] = v,
                None => return false,
            }
        }
        true
    }

    /// Fixes set `v` as one of group `gi`'s images if the matching can be
    /// repaired around it.
    fn commit(&self, gi: usize, v: u32, img: &[u32], flow: &mut Flow, stats: &mut SearchStats) -> bool {
        let tag = gi as u32 + 1;
        if flow.owner[v as usize] == tag {
            unset(&mut flow.avail, v);
            return true;
        }
        let saved = flow.clone();
        let grp = &self.groups[gi];
        let row = self.tables.row(grp.side, img[grp.anchor]);
        // Release one uncommitted set of this group.
        let mut spare = None;
        any_bit(row, &flow.avail, 0, |u| {
            if flow.owner[u as usize] == tag {
                spare = Some(u);
                true
            } else {
                false
            }
        });
        let Some(u) = spare else { return false };
        flow.owner[u as usize] = 0;
        let holder = flow.owner[v as usize];
        flow.owner[v as usize] = tag;
        unset(&mut flow.avail, v);
        if holder != 0 {
            flow.load[holder as usize - 1] -= 1;
            if !self.augment(holder as usize - 1, img, flow, stats) {
                *flow = saved;
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blowup::blowup;
    use crate::lattice::SetFamily;
    use crate::poset::Poset;

    #[test]
    fn fork_in_small_cube() {
        let fork = blowup(&Poset::chain(2), 0, 2).unwrap();
        let finder = CopyFinder::new(&fork, 2).unwrap();
        let g = MaskSet::from_family(&SetFamily::full(2));
        assert_eq!(finder.find(&g, None).unwrap(), vec![0, 1, 2]);
        assert_eq!(finder.find(&g, Some(&[0, 1, 3])).unwrap(), vec![0, 1, 2]);
        assert!(finder.find(&g, Some(&[1, 0, 0])).is_none());
        let g = MaskSet::from_family(&SetFamily::new(2, [1, 2, 3]).unwrap());
        assert!(finder.find(&g, None).is_none());
    }
}
