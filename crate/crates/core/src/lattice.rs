//! Set families in the Boolean lattice `2^[n]`, maximal-chain profiles and
//! marked-chain counting.
//!
//! A subset of `[n]` is a bitmask: bit `i` is set iff element `i + 1` belongs
//! to the set. A maximal chain of `2^[n]` is a permutation `σ` of the ground
//! set, read as `∅ ⊂ {σ_1} ⊂ {σ_1, σ_2} ⊂ ... ⊂ [n]`.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};

/// Largest ground set a mask can hold.
pub const MAX_N: usize = 31;

pub fn set_size(mask: u32) -> usize {
    mask.count_ones() as usize
}

pub fn is_proper_subset(a: u32, b: u32) -> bool {
    a & b == a && a != b
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub fn binomial_big(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `C(n, ⌊n/2⌋)`, the width of `2^[n]`.
pub fn central_binomial(n: usize) -> u128 {
    binomial(n, n / 2)
}

/// Sum of the `layers` largest binomial coefficients `C(n, ·)`, i.e. the size
/// of the largest union of that many consecutive layers.
pub fn largest_layers_size(n: usize, layers: usize) -> u128 {
    let mut sizes: Vec<u128> = (0..=n).map(|i| binomial(n, i)).collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes.into_iter().take(layers).sum()
}

/// A family `F ⊆ 2^[n]`, members strictly ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SetFamily {
    n: usize,
    members: Vec<u32>,
}

/// JSON wire form: `{"n": 3, "members": [0, 1, 3]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub n: usize,
    pub members: Vec<u32>,
}

impl SetFamily {
    /// Builds a family, sorting and deduplicating the masks.
    pub fn new(n: usize, masks: impl IntoIterator<Item = u32>) -> Result<Self> {
        if n > MAX_N {
            return Err(Error::Domain(format!("ground set size {n} exceeds {MAX_N}")));
        }
        let mut members: Vec<u32> = masks.into_iter().collect();
        if let Some(&bad) = members.iter().find(|&&m| (m as u64) >> n != 0) {
            return Err(Error::Domain(format!("mask {bad} is not a subset of [{n}]")));
        }
        members.sort_unstable();
        members.dedup();
        Ok(SetFamily { n, members })
    }

    /// Builds from masks already known to be sorted, unique and in range.
    pub(crate) fn from_sorted(n: usize, members: Vec<u32>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        SetFamily { n, members }
    }

    pub fn empty(n: usize) -> Self {
        SetFamily { n, members: Vec::new() }
    }

    /// All of `2^[n]`.
    pub fn full(n: usize) -> Self {
        SetFamily { n, members: (0..1u32 << n).collect() }
    }

    /// The layer of all `size`-subsets.
    pub fn layer(n: usize, size: usize) -> Self {
        Self::layers(n, size..=size)
    }

    pub fn layers(n: usize, sizes: std::ops::RangeInclusive<usize>) -> Self {
        let members = (0..1u32 << n)
            .filter(|&m| sizes.contains(&set_size(m)))
            .collect();
        SetFamily { n, members }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, mask: u32) -> bool {
        self.members.binary_search(&mask).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.members.iter().copied()
    }

    pub fn is_subfamily_of(&self, other: &SetFamily) -> bool {
        self.members.iter().all(|&m| other.contains(m))
    }

    pub fn with(&self, mask: u32) -> SetFamily {
        let mut members = self.members.clone();
        if let Err(pos) = members.binary_search(&mask) {
            members.insert(pos, mask);
        }
        SetFamily { n: self.n, members }
    }

    pub fn without(&self, mask: u32) -> SetFamily {
        SetFamily {
            n: self.n,
            members: self.members.iter().copied().filter(|&m| m != mask).collect(),
        }
    }

    pub fn union(&self, other: &SetFamily) -> SetFamily {
        let mut members: Vec<u32> = self.iter().chain(other.iter()).collect();
        members.sort_unstable();
        members.dedup();
        SetFamily { n: self.n, members }
    }

    pub fn intersection(&self, other: &SetFamily) -> SetFamily {
        SetFamily {
            n: self.n,
            members: self.iter().filter(|&m| other.contains(m)).collect(),
        }
    }

    pub fn difference(&self, other: &SetFamily) -> SetFamily {
        SetFamily {
            n: self.n,
            members: self.iter().filter(|&m| !other.contains(m)).collect(),
        }
    }

    /// Every member replaced by its complement in `[n]`.
    pub fn complement_map(&self) -> SetFamily {
        let full = ((1u64 << self.n) - 1) as u32;
        let mut members: Vec<u32> = self.iter().map(|m| !m & full).collect();
        members.sort_unstable();
        SetFamily { n: self.n, members }
    }

    pub fn to_spec(&self) -> FamilySpec {
        FamilySpec { n: self.n, members: self.members.clone() }
    }

    pub fn from_spec(spec: &FamilySpec) -> Result<Self> {
        Self::new(spec.n, spec.members.iter().copied())
    }

    /// Text form: `n` on the first line, then one member per line as an
    /// `n`-character 0/1 string whose `i`-th character is element `i + 1`.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for m in self.iter() {
            for i in 0..self.n {
                out.push(if m >> i & 1 == 1 { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    /// Parses the text form, or the JSON object form when the input starts
    /// with `{`.
    pub fn parse(input: &str) -> Result<Self> {
        let trimmed = input.trim_start();
        if trimmed.starts_with('{') {
            let spec: FamilySpec =
                serde_json::from_str(trimmed).map_err(|e| Error::Parse(e.to_string()))?;
            return Self::from_spec(&spec);
        }
        let mut lines = input
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let n: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("empty family file".into()))?
            .parse()
            .map_err(|_| Error::Parse("first line must be the ground set size".into()))?;
        let mut masks = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.len() != n {
                return Err(Error::Parse(format!(
                    "member {} has {} characters, expected {n}",
                    lineno + 1,
                    line.len()
                )));
            }
            let mut mask = 0u32;
            for (i, c) in line.chars().enumerate() {
                match c {
                    '1' => mask |= 1 << i,
                    '0' => {}
                    _ => return Err(Error::Parse(format!("bad character `{c}` in member {}", lineno + 1))),
                }
            }
            masks.push(mask);
        }
        Self::new(n, masks)
    }

    /// Human-readable listing like `{∅, {1}, {1,2}}`.
    pub fn pretty(&self) -> String {
        let mut out = String::from("{");
        for (idx, m) in self.iter().enumerate() {
            if idx > 0 {
                out.push_str(", ");
            }
            out.push_str(&pretty_set(m));
        }
        out.push('}');
        out
    }
}

pub fn pretty_set(mask: u32) -> String {
    if mask == 0 {
        return "∅".into();
    }
    let mut s = String::from("{");
    let mut first = true;
    for i in 0..32 {
        if mask >> i & 1 == 1 {
            if !first {
                s.push(',');
            }
            let _ = write!(s, "{}", i + 1);
            first = false;
        }
    }
    s.push('}');
    s
}

/// A bitmap over all `2^n` subsets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MaskSet {
    n: usize,
    words: Vec<u64>,
}

impl MaskSet {
    pub fn new(n: usize) -> Self {
        assert!(n <= 26, "mask bitmaps are limited to n <= 26");
        MaskSet { n, words: vec![0; (1usize << n).div_ceil(64)] }
    }

    pub fn from_family(f: &SetFamily) -> Self {
        let mut set = Self::new(f.n());
        for m in f.iter() {
            set.insert(m);
        }
        set
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn insert(&mut self, m: u32) {
        self.words[(m >> 6) as usize] |= 1 << (m & 63);
    }

    pub fn remove(&mut self, m: u32) {
        self.words[(m >> 6) as usize] &= !(1 << (m & 63));
    }

    pub fn contains(&self, m: u32) -> bool {
        self.words[(m >> 6) as usize] >> (m & 63) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros();
                bits &= bits - 1;
                Some((wi as u32) << 6 | b)
            })
        })
    }

    pub fn to_family(&self) -> SetFamily {
        SetFamily::from_sorted(self.n, self.iter().collect())
    }
}

/// `D_i`: the number of maximal chains of `2^[n]` meeting `F` in exactly
/// `i` sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainProfile {
    pub n: usize,
    /// `counts[i] = D_i` for `i = 0..=n+1`.
    pub counts: Vec<u128>,
}

impl ChainProfile {
    pub fn total(&self) -> u128 {
        self.counts.iter().sum()
    }

    /// `Σ_i i·D_i`.
    pub fn weighted_total(&self) -> u128 {
        self.counts.iter().enumerate().map(|(i, &d)| i as u128 * d).sum()
    }

    /// Checks `Σ D_i = n!` and `Σ i·D_i = Σ_{F ∈ F} n!/C(n,|F|)`.
    pub fn satisfies_identities(&self, f: &SetFamily) -> bool {
        self.total() == factorial(self.n) && self.weighted_total() == chain_incidences(f)
    }
}

/// `Σ_{F ∈ F} n!/C(n,|F|) = Σ |F|!(n-|F|)!`, the number of (chain, member)
/// incidences.
pub fn chain_incidences(f: &SetFamily) -> u128 {
    let n = f.n();
    f.iter()
        .map(|m| factorial(set_size(m)) * factorial(n - set_size(m)))
        .sum()
}

fn check_n(what: &'static str, n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::TooLarge { what, n, cap })
    } else {
        Ok(())
    }
}

/// Advances `perm` to the next permutation in lexicographic order.
pub(crate) fn next_permutation(perm: &mut [usize]) -> bool {
    let Some(i) = (1..perm.len()).rev().find(|&i| perm[i - 1] < perm[i]) else {
        return false;
    };
    let j = (i..perm.len()).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Chain profile by walking all `n!` maximal chains.
pub fn chain_profile_by_permutations(f: &SetFamily, cap: usize) -> Result<ChainProfile> {
    let n = f.n();
    check_n("chain_profile (permutations)", n, cap)?;
    let members = MaskSet::from_family(f);
    let mut counts = vec![0u128; n + 2];
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let mut set = 0u32;
        let mut hits = members.contains(0) as usize;
        for &e in &perm {
            set |= 1 << e;
            hits += members.contains(set) as usize;
        }
        counts[hits] += 1;
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(ChainProfile { n, counts })
}

/// Chain profile by dynamic programming over the lattice: the number of
/// chains from `∅` to `S` meeting `F` in `i` sets, built up one element at
/// a time.
pub fn chain_profile_dp(f: &SetFamily, cap: usize) -> Result<ChainProfile> {
    let n = f.n();
    check_n("chain_profile (dp)", n, cap)?;
    let members = MaskSet::from_family(f);
    let width = n + 2;
    let mut ways = vec![0u128; (1usize << n) * width];
    ways[members.contains(0) as usize] = 1;
    for s in 1..1u32 << n {
        let bump = members.contains(s) as usize;
        let base = s as usize * width;
        let mut bits = s;
        while bits != 0 {
            let e = bits.trailing_zeros();
            bits &= bits - 1;
            let from = (s ^ 1 << e) as usize * width;
            for i in 0..width - bump {
                ways[base + i + bump] += ways[from + i];
            }
        }
    }
    let top = ((1usize << n) - 1) * width;
    Ok(ChainProfile { n, counts: ways[top..top + width].to_vec() })
}

/// Exact chain profile, using the lattice DP.
pub fn chain_profile(f: &SetFamily) -> Result<ChainProfile> {
    let profile = chain_profile_dp(f, Caps::from_env()?.dp_n)?;
    debug_assert!(profile.satisfies_identities(f));
    Ok(profile)
}

/// Monte Carlo estimate of the chain profile from uniformly random maximal
/// chains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledProfile {
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    /// `hits[i]`: sampled chains meeting `F` in exactly `i` sets.
    pub hits: Vec<u64>,
}

impl SampledProfile {
    /// Estimate of `D_i / n!`.
    pub fn fraction(&self, i: usize) -> f64 {
        self.hits.get(i).copied().unwrap_or(0) as f64 / self.samples as f64
    }

    /// Estimated mean number of members per chain.
    pub fn mean(&self) -> f64 {
        self.hits
            .iter()
            .enumerate()
            .map(|(i, &h)| i as f64 * h as f64)
            .sum::<f64>()
            / self.samples as f64
    }

    /// Standard error of `mean`.
    pub fn std_error(&self) -> f64 {
        let mean = self.mean();
        let var = self
            .hits
            .iter()
            .enumerate()
            .map(|(i, &h)| (i as f64 - mean).powi(2) * h as f64)
            .sum::<f64>()
            / self.samples as f64;
        (var / self.samples as f64).sqrt()
    }
}

pub fn sample_chain_profile(f: &SetFamily, samples: u64, seed: u64) -> Result<SampledProfile> {
    if samples == 0 {
        return Err(Error::Domain("at least one sample is required".into()));
    }
    let n = f.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<u32> = (0..n as u32).collect();
    let mut hits = vec![0u64; n + 2];
    let start = f.contains(0) as usize;
    for _ in 0..samples {
        perm.shuffle(&mut rng);
        let mut set = 0u32;
        let mut count = start;
        for &e in &perm {
            set |= 1 << e;
            count += f.contains(set) as usize;
        }
        hits[count] += 1;
    }
    Ok(SampledProfile { n, samples, seed, hits })
}

/// A maximal chain together with `k` marker sizes, largest first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MarkedChain {
    /// The chain's ground-set order; element `perm[j]` is bit `perm[j]`.
    pub perm: Vec<u8>,
    /// Strictly decreasing sizes `|F_1| > |F_2| > ... > |F_k|`.
    pub marker_sizes: Vec<usize>,
}

impl MarkedChain {
    /// The chain's set of the given size.
    pub fn set_of_size(&self, size: usize) -> u32 {
        self.perm[..size].iter().fold(0u32, |acc, &e| acc | 1 << e)
    }

    /// Markers `F_1 ⊋ F_2 ⊋ ... ⊋ F_k`.
    pub fn markers(&self) -> Vec<u32> {
        self.marker_sizes.iter().map(|&s| self.set_of_size(s)).collect()
    }

    pub fn k(&self) -> usize {
        self.marker_sizes.len()
    }

    /// Checks the marked-chain conditions against `F`, `k` and `a`.
    pub fn check(&self, f: &SetFamily, k: usize, a: usize) -> std::result::Result<(), String> {
        let n = f.n();
        let mut seen = vec![false; n];
        if self.perm.len() != n {
            return Err(format!("permutation has length {}, expected {n}", self.perm.len()));
        }
        for &e in &self.perm {
            if e as usize >= n || seen[e as usize] {
                return Err("not a permutation of the ground set".into());
            }
            seen[e as usize] = true;
        }
        if self.marker_sizes.len() != k {
            return Err(format!("{} markers, expected {k}", self.marker_sizes.len()));
        }
        if self.marker_sizes.iter().any(|&s| s > n) {
            return Err("marker size exceeds n".into());
        }
        if self.marker_sizes.windows(2).any(|w| w[0] < w[1] + a.max(1)) {
            return Err(format!("consecutive markers differ by less than {a}"));
        }
        if let Some(m) = self.markers().into_iter().find(|&m| !f.contains(m)) {
            return Err(format!("marker {} is not in the family", pretty_set(m)));
        }
        Ok(())
    }
}

fn check_marked_params(k: usize, a: usize) -> Result<()> {
    if k == 0 || a == 0 {
        return Err(Error::Domain("k and a must be positive".into()));
    }
    Ok(())
}

/// Number of `(k, a)`-marked chains with markers in `F`, counted as pairs
/// (maximal chain, marker selection).
///
/// Works over marker sequences rather than chains: a nested sequence
/// `F_1 ⊋ ... ⊋ F_k` lies on `|F_k|! · Π (|F_i| - |F_{i+1}|)! · (n - |F_1|)!`
/// maximal chains.
pub fn count_marked_chains(f: &SetFamily, k: usize, a: usize) -> Result<u128> {
    count_marked_chains_capped(f, k, a, Caps::from_env()?.dp_n)
}

pub fn count_marked_chains_capped(f: &SetFamily, k: usize, a: usize, cap: usize) -> Result<u128> {
    check_marked_params(k, a)?;
    let n = f.n();
    check_n("count_marked_chains", n, cap)?;
    let fact: Vec<u128> = (0..=n).map(factorial).collect();
    let members = f.members();
    // weight[idx]: weighted count of marker sequences of the current length
    // whose largest marker is members[idx].
    let mut weight: Vec<u128> = members.iter().map(|&m| fact[set_size(m)]).collect();
    let mut index = vec![usize::MAX; 1usize << n];
    for (idx, &m) in members.iter().enumerate() {
        index[m as usize] = idx;
    }
    for _ in 1..k {
        let mut next = vec![0u128; members.len()];
        for (idx, &top) in members.iter().enumerate() {
            let top_size = set_size(top);
            if top_size < a {
                continue;
            }
            // Proper submasks of `top`.
            let mut sub = top;
            let mut acc = 0u128;
            loop {
                sub = sub.wrapping_sub(1) & top;
                let gap = top_size - set_size(sub);
                if gap >= a {
                    let j = index[sub as usize];
                    if j != usize::MAX {
                        acc += weight[j] * fact[gap];
                    }
                }
                if sub == 0 {
                    break;
                }
            }
            next[idx] = acc;
        }
        weight = next;
    }
    Ok(members
        .iter()
        .zip(&weight)
        .map(|(&m, &w)| w * fact[n - set_size(m)])
        .sum())
}

/// All `(k, a)`-marked chains with markers in `F`; chains in lexicographic
/// permutation order, selections in lexicographic size order.
pub fn enumerate_marked_chains(f: &SetFamily, k: usize, a: usize) -> Result<Vec<MarkedChain>> {
    check_marked_params(k, a)?;
    let n = f.n();
    check_n("enumerate_marked_chains", n, Caps::from_env()?.exact_n.min(8))?;
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let mut set = 0u32;
        let mut sizes_in_f = Vec::new();
        if f.contains(0) {
            sizes_in_f.push(0);
        }
        for (j, &e) in perm.iter().enumerate() {
            set |= 1 << e;
            if f.contains(set) {
                sizes_in_f.push(j + 1);
            }
        }
        sizes_in_f.reverse();
        let mut chosen = Vec::with_capacity(k);
        select_markers(&sizes_in_f, 0, k, a, &mut chosen, &mut |sizes| {
            out.push(MarkedChain {
                perm: perm.iter().map(|&e| e as u8).collect(),
                marker_sizes: sizes.to_vec(),
            })
        });
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(out)
}

fn select_markers(
    sizes_desc: &[usize],
    from: usize,
    k: usize,
    a: usize,
    chosen: &mut Vec<usize>,
    emit: &mut impl FnMut(&[usize]),
) {
    if chosen.len() == k {
        emit(chosen);
        return;
    }
    for idx in from..sizes_desc.len() {
        let s = sizes_desc[idx];
        if chosen.last().is_some_and(|&prev| prev < s + a) {
            continue;
        }
        chosen.push(s);
        select_markers(sizes_desc, idx + 1, k, a, chosen, emit);
        chosen.pop();
    }
}

/// `Σ_i C(i - (k-1)(a-1), k) · D_i`, the count of marker selections obtained
/// by spacing the ones of a binary string; a lower bound on the true count.
pub fn binomial_string_lower_bound(profile: &ChainProfile, k: usize, a: usize) -> u128 {
    let shift = (k - 1) * (a - 1);
    profile
        .counts
        .iter()
        .enumerate()
        .filter(|&(i, _)| i >= shift)
        .map(|(i, &d)| binomial(i - shift, k) * d)
        .sum()
}

/// Outcome of checking the marked-chain supersaturation bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkedBound {
    pub holds: bool,
    /// `(ε / k) · n!`.
    pub bound: f64,
    pub count: u128,
}

/// For `|F| > ((k-1)a + ε) C(n, ⌊n/2⌋)`, checks that at least `(ε/k) n!`
/// marked chains exist.
pub fn marked_chain_lower_bound(f: &SetFamily, k: usize, a: usize, eps: f64) -> Result<MarkedBound> {
    check_marked_params(k, a)?;
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::Domain("ε must be positive".into()));
    }
    let n = f.n();
    let threshold = ((k - 1) as f64 * a as f64 + eps) * central_binomial(n) as f64;
    if f.len() as f64 <= threshold {
        return Err(Error::Precondition(format!(
            "|F| = {} does not exceed (({}-1)·{} + {eps})·C({n},{}) = {threshold}",
            f.len(),
            k,
            a,
            n / 2
        )));
    }
    let count = count_marked_chains(f, k, a)?;
    let bound = eps / k as f64 * factorial(n) as f64;
    Ok(MarkedBound { holds: count as f64 >= bound, bound, count })
}

/// Binary entropy `H(p)` with `H(0) = H(1) = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyBound {
    /// `Σ_{i ≤ αn} C(n, i)`.
    pub lhs: BigUint,
    /// `2^{H(α) n}`.
    pub rhs: f64,
}

impl EntropyBound {
    pub fn holds(&self) -> bool {
        self.lhs.to_f64().unwrap_or(f64::INFINITY) <= self.rhs * (1.0 + 1e-12)
    }
}

pub fn entropy_bound(alpha: f64, n: usize) -> Result<EntropyBound> {
    if !(0.0..=0.5).contains(&alpha) {
        return Err(Error::Domain(format!("α = {alpha} is outside [0, 1/2]")));
    }
    let limit = (alpha * n as f64 + 1e-9).floor() as usize;
    let lhs = (0..=limit.min(n)).map(|i| binomial_big(n, i)).sum();
    let bound = EntropyBound { lhs, rhs: (binary_entropy(alpha) * n as f64).exp2() };
    debug_assert!(bound.holds());
    Ok(bound)
}

/// Splits `F` into the members with `αn ≤ |F| ≤ (1-α)n` and the rest.
pub fn trim_alpha(f: &SetFamily, alpha: f64) -> Result<(SetFamily, SetFamily)> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::Domain(format!("α = {alpha} is outside (0, 1/2)")));
    }
    let n = f.n() as f64;
    let (lo, hi) = (alpha * n, (1.0 - alpha) * n);
    let (tail, mid): (Vec<u32>, Vec<u32>) = f.iter().partition(|&m| {
        let s = set_size(m) as f64;
        s < lo || s > hi
    });
    Ok((
        SetFamily::from_sorted(f.n(), mid),
        SetFamily::from_sorted(f.n(), tail),
    ))
}
