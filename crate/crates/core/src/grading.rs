//! Graded completions of tree posets and graded chain covers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poset::Poset;

/// A graded tree poset containing `P` as an induced subposet.
#[derive(Debug, Clone)]
pub struct GradedCompletion {
    pub hat: Poset,
    /// `embed_map[a]` is the element of `hat` playing the role of `a`.
    pub embed_map: Vec<usize>,
    /// Number of maximal chains of the original poset.
    pub s: u128,
    /// Height of the original poset.
    pub k: usize,
}

impl GradedCompletion {
    /// The size bound `s * k`.
    pub fn size_bound(&self) -> u128 {
        self.s * self.k as u128
    }

    pub fn within_bound(&self) -> bool {
        (self.hat.len() as u128) <= self.size_bound()
    }
}

/// Completes a tree poset to a graded one of the same height.
///
/// Each cover `(x, y)` is subdivided by `level(y) - level(x) - 1` fresh
/// elements, where `level` counts the elements of a longest chain ending at
/// an element; then each maximal element below level `k` gets a pendant
/// ascending chain up to level `k`. Original elements keep their indices and
/// fresh ones are appended.
pub fn graded_completion(p: &Poset) -> Result<GradedCompletion> {
    if !p.is_tree() {
        return Err(Error::NotTree);
    }
    let levels = p.levels();
    let k = levels.iter().copied().max().unwrap_or(0);
    let mut next = p.len();
    let mut covers = Vec::new();
    for &(x, y) in p.covers() {
        let mut prev = x;
        for _ in 0..levels[y] - levels[x] - 1 {
            covers.push((prev, next));
            prev = next;
            next += 1;
        }
        covers.push((prev, y));
    }
    for top in p.maximal_elements() {
        let mut prev = top;
        for _ in levels[top]..k {
            covers.push((prev, next));
            prev = next;
            next += 1;
        }
    }
    Ok(GradedCompletion {
        hat: Poset::from_trusted(next, covers),
        embed_map: (0..p.len()).collect(),
        s: p.count_maximal_chains(),
        k,
    })
}

/// Checks the completion invariants against the original poset.
pub fn verify_completion(p: &Poset, c: &GradedCompletion) -> bool {
    let hat = &c.hat;
    let induced = (0..p.len()).all(|a| {
        (0..p.len()).all(|b| p.less(a, b) == hat.less(c.embed_map[a], c.embed_map[b]))
    });
    let injective = {
        let mut seen = c.embed_map.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len() == p.len()
    };
    hat.is_tree()
        && hat.is_graded()
        && hat.height() == p.height()
        && induced
        && injective
        && c.within_bound()
}

/// A leaf `v` and an interval `I` containing it whose removal leaves a graded
/// tree poset of the same height.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovableInterval {
    pub leaf: usize,
    /// Elements of the interval, ascending.
    pub interval: Vec<usize>,
    /// The interval contains a minimal element (otherwise a maximal one).
    pub at_bottom: bool,
}

fn require_graded_tree(p: &Poset) -> Result<()> {
    if !p.is_tree() {
        return Err(Error::NotTree);
    }
    if !p.is_graded() {
        return Err(Error::NotGraded);
    }
    Ok(())
}

fn remainder_ok(p: &Poset, interval: &[usize], k: usize) -> bool {
    let keep: Vec<usize> = (0..p.len()).filter(|e| !interval.contains(e)).collect();
    let (rest, _) = p.induced(&keep);
    rest.is_tree() && rest.is_graded() && rest.height() == k
}

/// Exhaustive search for a removable interval: leaves in index order, then
/// intervals hanging from the leaf in increasing size.
pub fn find_removable_interval(p: &Poset) -> Result<RemovableInterval> {
    require_graded_tree(p)?;
    if p.is_chain() {
        return Err(Error::IsChain);
    }
    let k = p.height();
    let hasse = p.hasse();
    for v in (0..p.len()).filter(|&v| hasse.degree(v) == 1) {
        let at_bottom = p.is_minimal(v);
        let mut candidates: Vec<Vec<usize>> = (0..p.len())
            .filter(|&y| if at_bottom { p.leq(v, y) } else { p.leq(y, v) })
            .map(|y| if at_bottom { p.interval(v, y) } else { p.interval(y, v) })
            .filter(|iv| iv.len() < k)
            .collect();
        candidates.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        if let Some(interval) = candidates.into_iter().find(|iv| remainder_ok(p, iv, k)) {
            return Ok(RemovableInterval { leaf: v, interval, at_bottom });
        }
    }
    Err(Error::InvalidInput(
        "no removable interval found in a graded tree poset".into(),
    ))
}

/// Maximal chains `C_1, ..., C_l` built up one hanging interval at a time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedChainCover {
    /// Each chain ascending.
    pub chains: Vec<Vec<usize>>,
    /// `intervals[j - 2]` is `I_j = C_j \ (C_1 ∪ ... ∪ C_{j-1})`, ascending.
    pub intervals: Vec<Vec<usize>>,
}

impl GradedChainCover {
    pub fn len(&self) -> usize {
        self.chains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chains.is_empty()
    }

    /// `I_j` for `j >= 1`, taking `I_1 = C_1`.
    pub fn new_part(&self, j: usize) -> &[usize] {
        if j == 1 {
            &self.chains[0]
        } else {
            &self.intervals[j - 2]
        }
    }
}

pub fn graded_chain_cover(p: &Poset) -> Result<GradedChainCover> {
    require_graded_tree(p)?;
    cover_rec(p)
}

fn cover_rec(p: &Poset) -> Result<GradedChainCover> {
    if p.is_chain() {
        let levels = p.levels();
        let mut chain: Vec<usize> = (0..p.len()).collect();
        chain.sort_by_key(|&e| levels[e]);
        return Ok(GradedChainCover { chains: vec![chain], intervals: Vec::new() });
    }
    let removed = find_removable_interval(p)?;
    let interval = removed.interval;
    let keep: Vec<usize> = (0..p.len()).filter(|e| !interval.contains(e)).collect();
    let (rest, map) = p.induced(&keep);
    let sub = cover_rec(&rest)?;
    let lift = |xs: &[usize]| -> Vec<usize> { xs.iter().map(|&e| map[e]).collect() };
    let mut cover = GradedChainCover {
        chains: sub.chains.iter().map(|c| lift(c)).collect(),
        intervals: sub.intervals.iter().map(|c| lift(c)).collect(),
    };

    // The unique element outside I adjacent to its far end.
    let (end, neighbours) = if removed.at_bottom {
        let top = *interval.last().unwrap();
        (top, p.upper_covers(top))
    } else {
        let bottom = interval[0];
        (bottom, p.lower_covers(bottom))
    };
    let outside: Vec<usize> = neighbours
        .iter()
        .copied()
        .filter(|e| !interval.contains(e))
        .collect();
    let [u] = outside[..] else {
        return Err(Error::InvalidInput(format!(
            "interval end {end} has {} neighbours outside the interval",
            outside.len()
        )));
    };
    let j = (1..=cover.len())
        .find(|&j| cover.new_part(j).contains(&u))
        .expect("the parts I_1, ..., I_s partition the remainder");
    let host = &cover.chains[j - 1];
    let chain: Vec<usize> = if removed.at_bottom {
        interval
            .iter()
            .copied()
            .chain(host.iter().copied().filter(|&x| p.leq(u, x)))
            .collect()
    } else {
        host.iter()
            .copied()
            .filter(|&x| p.leq(x, u))
            .chain(interval.iter().copied())
            .collect()
    };
    cover.chains.push(chain);
    cover.intervals.push(interval);
    Ok(cover)
}

/// Clause-by-clause verification of a graded chain cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverReport {
    /// Every chain is a maximal chain with exactly `k` elements.
    pub chains_maximal: bool,
    /// (i): each prefix union is graded of height `k`, the full union is `P`.
    pub prefix_graded: bool,
    /// (ii): each `I_j` is the nonempty set difference and an interval
    /// holding a minimal or maximal element.
    pub intervals_ok: bool,
    /// (iii): `C_j \ I_j` lies inside an earlier chain.
    pub nested_ok: bool,
    /// The number of chains equals the number of maximal chains of `P`.
    /// Not implied by (i)-(iii): the X poset has four maximal chains, yet
    /// its covers stop at three.
    pub count_ok: bool,
}

impl CoverReport {
    /// Maximality and clauses (i)-(iii).
    pub fn passed(&self) -> bool {
        self.chains_maximal && self.prefix_graded && self.intervals_ok && self.nested_ok
    }
}

pub fn verify_chain_cover(p: &Poset, cover: &GradedChainCover) -> CoverReport {
    let k = p.height();
    let all_chains = p.maximal_chains();
    let l = cover.chains.len();

    let chains_maximal = l > 0
        && cover.chains.iter().all(|c| {
            c.len() == k && all_chains.iter().any(|mc| mc == c)
        });

    let mut union = vec![false; p.len()];
    let mut prefix_graded = true;
    for c in &cover.chains {
        for &e in c {
            union[e] = true;
        }
        let members: Vec<usize> = (0..p.len()).filter(|&e| union[e]).collect();
        let (sub, _) = p.induced(&members);
        prefix_graded &= sub.is_graded() && sub.height() == k;
    }
    prefix_graded &= union.iter().all(|&b| b);

    let mut intervals_ok = cover.intervals.len() + 1 == l;
    let mut nested_ok = intervals_ok;
    if intervals_ok {
        let mut seen = vec![false; p.len()];
        for &e in &cover.chains[0] {
            seen[e] = true;
        }
        for j in 2..=l {
            let chain = &cover.chains[j - 1];
            let mut diff: Vec<usize> = chain.iter().copied().filter(|&e| !seen[e]).collect();
            let mut given = cover.intervals[j - 2].clone();
            diff.sort_unstable();
            given.sort_unstable();
            let is_interval = !diff.is_empty() && {
                let lo = *diff.iter().min_by_key(|&&e| p.down_set(e).len()).unwrap();
                let hi = *diff.iter().max_by_key(|&&e| p.down_set(e).len()).unwrap();
                let mut iv = p.interval(lo, hi);
                iv.sort_unstable();
                iv == diff
            };
            let extreme = diff.iter().any(|&e| p.is_minimal(e) || p.is_maximal(e));
            intervals_ok &= diff == given && is_interval && extreme;

            let rest: Vec<usize> = chain.iter().copied().filter(|e| !diff.contains(e)).collect();
            nested_ok &= cover.chains[..j - 1]
                .iter()
                .any(|earlier| rest.iter().all(|e| earlier.contains(e)));
            for &e in chain {
                seen[e] = true;
            }
        }
    }

    CoverReport {
        chains_maximal,
        prefix_graded,
        intervals_ok,
        nested_ok,
        count_ok: l as u128 == p.count_maximal_chains(),
    }
}
