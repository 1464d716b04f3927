//! Exhaustive ground truth at small `n`: numbers of `P`-free families,
//! `La(n, P)`, the layer-window certificate for `e(P)`, and the container
//! bookkeeping table.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::containers::{default_t2, two_phase};
use crate::embedding::{is_p_free, PosetMatcher};
use crate::error::{Error, Result};
use crate::lattice::{binomial, central_binomial, largest_layers_size, set_size, SetFamily};
use crate::poset::Poset;

fn check_n(what: &'static str, n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::TooLarge { what, n, cap })
    } else {
        Ok(())
    }
}

/// Number of `P`-free families in `2^[n]`, exactly.
pub fn count_p_free(n: usize, p: &Poset) -> Result<BigUint> {
    count_p_free_capped(n, p, Caps::from_env()?.census_n)
}

/// Depth-first over masks in increasing order, deciding membership one mask
/// at a time. A branch dies as soon as the new member completes a copy of
/// `P`; a branch whose remaining masks can all be added without creating a
/// copy contributes `2^remaining` at once.
pub fn count_p_free_capped(n: usize, p: &Poset, cap: usize) -> Result<BigUint> {
    check_n("count_p_free", n, cap)?;
    let matcher = PosetMatcher::new(p);
    let empty = SetFamily::empty(n);
    if matcher.find(&empty).is_some() {
        return Ok(BigUint::zero());
    }
    let total = 1usize << n;
    // Split on the first few masks and run the subtrees in parallel.
    let split = total.min(6);
    let mut prefixes = vec![Vec::new()];
    for mask in 0..split as u32 {
        let mut next = Vec::new();
        for fam in prefixes {
            let with: Vec<u32> = fam.iter().copied().chain([mask]).collect();
            next.push(fam);
            let f = SetFamily::from_sorted(n, with.clone());
            if matcher.find_using(&f, mask).is_none() {
                next.push(with);
            }
        }
        prefixes = next;
    }
    let counts: Vec<BigUint> = prefixes
        .into_par_iter()
        .map(|fam| {
            let mut members = fam;
            count_from(&matcher, n, split as u32, &mut members)
        })
        .collect();
    Ok(counts.into_iter().sum())
}

fn count_from(matcher: &PosetMatcher, n: usize, next: u32, members: &mut Vec<u32>) -> BigUint {
    let total = 1u32 << n;
    if next == total {
        return BigUint::one();
    }
    let rest: Vec<u32> = members.iter().copied().chain(next..total).collect();
    if matcher.find(&SetFamily::from_sorted(n, rest)).is_none() {
        return BigUint::one() << (total - next) as usize;
    }
    let mut acc = count_from(matcher, n, next + 1, members);
    members.push(next);
    if matcher.find_using(&SetFamily::from_sorted(n, members.clone()), next).is_none() {
        acc += count_from(matcher, n, next + 1, members);
    }
    members.pop();
    acc
}

/// A symmetric chain decomposition of `2^[n]`, built recursively.
pub fn symmetric_chains(n: usize) -> Vec<Vec<u32>> {
    let mut chains = vec![vec![0u32]];
    for e in 0..n {
        let bit = 1u32 << e;
        let mut next = Vec::with_capacity(chains.len() * 2);
        for c in chains {
            let mut longer = c.clone();
            longer.push(c.last().unwrap() | bit);
            next.push(longer);
            if c.len() >= 2 {
                next.push(c[..c.len() - 1].iter().map(|&m| m | bit).collect());
            }
        }
        chains = next;
    }
    chains
}

/// `La(n, P)`: size of a largest `P`-free family in `2^[n]`.
pub fn la(n: usize, p: &Poset) -> Result<usize> {
    la_capped(n, p, Caps::from_env()?.la_n)
}

/// Branch and bound. Any poset embeds in a chain of its own size, so a
/// `P`-free family meets every chain of a symmetric chain decomposition in
/// at most `|P| - 1` sets; summing over chains bounds what can still be
/// added. Masks are tried middle layers first, members before non-members.
pub fn la_capped(n: usize, p: &Poset, cap: usize) -> Result<usize> {
    check_n("la", n, cap)?;
    if p.is_empty() {
        return Ok(0);
    }
    let chains = symmetric_chains(n);
    let mut chain_of = vec![0usize; 1 << n];
    for (ci, c) in chains.iter().enumerate() {
        for &m in c {
            chain_of[m as usize] = ci;
        }
    }
    let mut order: Vec<u32> = (0..1u32 << n).collect();
    order.sort_by_key(|&m| ((2 * set_size(m)).abs_diff(n), m));
    let mut search = LaSearch {
        n,
        matcher: PosetMatcher::new(p),
        per_chain: p.len() - 1,
        chain_of,
        order,
        used: vec![0; chains.len()],
        open: chains.iter().map(Vec::len).collect(),
        members: Vec::new(),
        best: 0,
    };
    search.best = search.greedy();
    search.members.clear();
    search.used.iter_mut().for_each(|u| *u = 0);
    search.run(0);
    Ok(search.best)
}

struct LaSearch<'p> {
    n: usize,
    matcher: PosetMatcher<'p>,
    per_chain: usize,
    chain_of: Vec<usize>,
    order: Vec<u32>,
    /// Members taken from each chain.
    used: Vec<usize>,
    /// Undecided masks left in each chain.
    open: Vec<usize>,
    members: Vec<u32>,
    best: usize,
}

impl LaSearch<'_> {
    fn accepts(&self, mask: u32) -> bool {
        let mut with = self.members.clone();
        with.push(mask);
        let f = SetFamily::new(self.n, with).expect("masks in range");
        self.matcher.find_using(&f, mask).is_none()
    }

    fn greedy(&mut self) -> usize {
        for idx in 0..self.order.len() {
            let mask = self.order[idx];
            if self.accepts(mask) {
                self.members.push(mask);
            }
        }
        self.members.len()
    }

    fn bound(&self) -> usize {
        self.members.len()
            + self
                .used
                .iter()
                .zip(&self.open)
                .map(|(&u, &o)| self.per_chain.saturating_sub(u).min(o))
                .sum::<usize>()
    }

    fn run(&mut self, idx: usize) {
        if self.bound() <= self.best {
            return;
        }
        if idx == self.order.len() {
            self.best = self.members.len();
            return;
        }
        let mask = self.order[idx];
        let c = self.chain_of[mask as usize];
        self.open[c] -= 1;
        if self.used[c] < self.per_chain && self.accepts(mask) {
            self.used[c] += 1;
            self.members.push(mask);
            self.run(idx + 1);
            self.members.pop();
            self.used[c] -= 1;
        }
        self.run(idx + 1);
        self.open[c] += 1;
    }
}

/// The largest `ℓ ≤ n_max + 1` such that every window of `ℓ` consecutive
/// layers of `2^[n]` is `P`-free for all `n ≤ n_max`. Windows longer than
/// `n + 1` layers do not exist at that `n`.
pub fn e_lower(p: &Poset, n_max: usize) -> Result<usize> {
    check_n("e_lower", n_max, Caps::from_env()?.e_lower_n)?;
    let window_ok = |len: usize| {
        (0..=n_max).all(|n| {
            (0..=(n + 1).saturating_sub(len)).all(|lo| {
                lo + len > n + 1 || is_p_free(&SetFamily::layers(n, lo..=lo + len - 1), p)
            })
        })
    };
    let mut best = 0;
    for len in 1..=n_max + 1 {
        if !window_ok(len) {
            break;
        }
        best = len;
    }
    Ok(best)
}

/// `Σ` of the `k - 1` largest binomial coefficients `C(n, ·)`: any family
/// inside that many consecutive middle layers has no `k`-chain, so every
/// subfamily is free of any poset of height `k`.
pub fn lower_bound_exponent(n: usize, height: usize) -> u128 {
    largest_layers_size(n, height.saturating_sub(1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusResult {
    pub n: usize,
    pub poset: String,
    pub count: BigUint,
    pub la: usize,
    /// `log₂(count) / C(n, ⌊n/2⌋)`.
    pub normalized: f64,
}

pub fn census(n: usize, p: &Poset, name: &str) -> Result<CensusResult> {
    let count = count_p_free(n, p)?;
    let la = la(n, p)?;
    Ok(CensusResult { n, poset: name.to_string(), normalized: log2_big(&count) / central_binomial(n) as f64, count, la })
}

pub fn log2_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().log2();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap().log2() + shift as f64
}

/// A random `P`-free family: masks in seeded random order, each kept with
/// probability `keep` when it does not complete a copy of `P`. With
/// `keep = 1` the result is a maximal `P`-free family.
pub fn random_p_free_family(n: usize, p: &Poset, seed: u64, keep: f64) -> Result<SetFamily> {
    if !(0.0..=1.0).contains(&keep) {
        return Err(Error::Domain(format!("keep probability {keep} outside [0, 1]")));
    }
    if n > 12 {
        return Err(Error::TooLarge { what: "random_p_free_family", n, cap: 12 });
    }
    let matcher = PosetMatcher::new(p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut masks: Vec<u32> = (0..1u32 << n).collect();
    masks.shuffle(&mut rng);
    let mut fam = SetFamily::empty(n);
    if matcher.find(&fam).is_some() {
        return Ok(fam);
    }
    for mask in masks {
        if keep < 1.0 && !rng.gen_bool(keep) {
            continue;
        }
        let with = fam.with(mask);
        if matcher.find_using(&with, mask).is_none() {
            fam = with;
        }
    }
    Ok(fam)
}

/// One row of the container bookkeeping table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub n: usize,
    /// Exact number of `P`-free families, when within the census cap.
    pub count: Option<BigUint>,
    pub la: Option<usize>,
    /// Number of inputs fed to the container runs.
    pub inputs: usize,
    /// Distinct container pairs seen.
    pub pairs: usize,
    pub max_h: usize,
    pub max_g: usize,
    /// `|C| · 2^{max |G|}`.
    pub upper_expression: BigUint,
    /// `Σ` of the `k - 1` largest layer sizes.
    pub lower_exponent: u128,
    /// `count ≥ 2^{lower_exponent}`, when the count is known.
    pub lower_bound_holds: Option<bool>,
}

impl ExperimentRow {
    pub fn max_g_normalized(&self) -> f64 {
        self.max_g as f64 / central_binomial(self.n) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub t1: Option<usize>,
    pub t2: Option<usize>,
    pub root: usize,
    pub samples: usize,
    pub seed: u64,
    /// Largest `n` for the exact count.
    pub count_n: usize,
    /// Largest `n` for `La`.
    pub la_n: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig { t1: None, t2: None, root: 0, samples: 50, seed: 0, count_n: 4, la_n: 4 }
    }
}

/// For each `n`: exact count and `La` where cheap, container runs (two
/// phases, `t1 = n` and `t2 = ⌈log₂ n⌉` unless given) on seeded random
/// `P`-free inputs, and the two sides of the counting argument.
pub fn container_experiment(
    p: &Poset,
    ns: impl IntoIterator<Item = usize>,
    config: &ExperimentConfig,
) -> Result<Vec<ExperimentRow>> {
    let k = p.height();
    let mut rows = Vec::new();
    for n in ns {
        let count = if n <= config.count_n { Some(count_p_free(n, p)?) } else { None };
        let la_value = if n <= config.la_n { Some(la(n, p)?) } else { None };
        let t1 = config.t1.unwrap_or(n).max(1);
        let t2 = config.t2.unwrap_or_else(|| default_t2(n));
        let keeps = [1.0, 0.7, 0.4];
        let inputs: Vec<SetFamily> = (0..config.samples)
            .map(|i| {
                let seed = config.seed.wrapping_mul(0x9E37_79B9).wrapping_add(i as u64);
                random_p_free_family(n, p, seed, keeps[i % keeps.len()])
            })
            .collect::<Result<_>>()?;
        let results: Vec<_> = inputs
            .par_iter()
            .map(|f| two_phase(p, config.root, n, f, t1, t2))
            .collect::<Result<_>>()?;
        let mut keys: Vec<&[u32]> = results.iter().map(|r| r.h.members()).collect();
        keys.sort_unstable();
        keys.dedup();
        let max_h = results.iter().map(|r| r.h.len()).max().unwrap_or(0);
        let max_g = results.iter().map(|r| r.g.len()).max().unwrap_or(0);
        let lower_exponent = lower_bound_exponent(n, k);
        let lower_bound_holds = count
            .as_ref()
            .map(|c| *c >= BigUint::one() << lower_exponent as usize);
        rows.push(ExperimentRow {
            n,
            la: la_value,
            inputs: inputs.len(),
            pairs: keys.len(),
            max_h,
            max_g,
            upper_expression: BigUint::from(keys.len()) << max_g,
            lower_exponent,
            lower_bound_holds,
            count,
        });
    }
    Ok(rows)
}

pub fn experiment_csv(rows: &[ExperimentRow]) -> String {
    let mut out = String::from(
        "n,count,la,inputs,pairs,max_h,max_g,max_g_normalized,upper_expression,lower_exponent,lower_bound_holds\n",
    );
    let opt = |v: Option<String>| v.unwrap_or_default();
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{:.6},{},{},{}",
            r.n,
            opt(r.count.as_ref().map(ToString::to_string)),
            opt(r.la.map(|v| v.to_string())),
            r.inputs,
            r.pairs,
            r.max_h,
            r.max_g,
            r.max_g_normalized(),
            r.upper_expression,
            r.lower_exponent,
            opt(r.lower_bound_holds.map(|v| v.to_string())),
        )
        .unwrap();
    }
    out
}

/// Sum of the `k - 1` largest binomials, as used for chain posets.
pub fn chain_la_formula(n: usize, k: usize) -> u128 {
    let mut sizes: Vec<u128> = (0..=n).map(|i| binomial(n, i)).collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes.iter().take(k.saturating_sub(1)).sum()
}
