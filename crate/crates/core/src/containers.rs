//! The deterministic container algorithm for blowups of tree posets.
//!
//! Given a `P`-free `F ⊆ S`, the algorithm starts from `H = ∅`, `G = S` and,
//! while `G` contains the blowup `P(x, t)`, takes the least copy `π` and
//! walks it along the leaf ordering, growing a partial copy `Q` of `P`
//! inside `F`:
//!
//! 1. if `π(x_{1,1}) ∉ F`, drop it from `G`;
//! 2. otherwise start `Q = {π(x_{1,1})}`;
//! 3. with `Q` covering `x_1..x_j`, look at the group of copies of `x_{j+1}`
//!    attached to the chosen copy of its attachment neighbour. If some member
//!    maps into `F`, the first one joins `Q`; if none does, `Q` moves to `H`
//!    and both `Q` and the group's image leave `G`.
//!
//! The output satisfies `H ⊆ F ⊆ H ∪ G`, `|H| ≤ |P||S|/t`, `G` is
//! `P(x, t)`-free, and `H` determines `G`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blowup::{blowup, BlowupPoset};
use crate::copies::CopyFinder;
use crate::embedding::{first_copy, is_p_free};
use crate::error::{Error, Result};
use crate::lattice::{binomial_big, MaskSet, SetFamily};
use crate::poset::{Poset, PosetSpec};

/// Parameters of one container run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Phase {
    pub t: usize,
    /// `|S|` for this run.
    pub s_size: usize,
}

/// Counters for one or more runs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub iterations: usize,
    /// Step-1 firings: a single non-member removed from `G`.
    pub step1: usize,
    /// Step-3.2 firings: a partial copy moved to `H`.
    pub step32: usize,
    pub search_nodes: u64,
}

impl RunStats {
    fn add(&mut self, other: &RunStats) {
        self.iterations += other.iterations;
        self.step1 += other.step1;
        self.step32 += other.step32;
        self.search_nodes += other.search_nodes;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContainerPair {
    pub h: SetFamily,
    pub g: SetFamily,
    pub poset: PosetSpec,
    pub root: usize,
    /// Blowup factor of the final run: `G` is `P(root, t)`-free.
    pub t: usize,
    /// Ground family of the first run.
    pub s: SetFamily,
    pub phases: Vec<Phase>,
    pub stats: RunStats,
}

impl ContainerPair {
    /// `|P| · Σ |S_i| / t_i` over the runs; a single run gives `|P||S|/t`.
    pub fn h_bound(&self) -> f64 {
        self.poset.m as f64 * self.phases.iter().map(|ph| ph.s_size as f64 / ph.t as f64).sum::<f64>()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("pairs serialize")
    }

    pub fn from_json(input: &str) -> Result<Self> {
        let pair: ContainerPair = serde_json::from_str(input).map_err(|e| Error::Parse(e.to_string()))?;
        Poset::from_spec(&pair.poset)?;
        for fam in [&pair.h, &pair.g, &pair.s] {
            if SetFamily::new(fam.n(), fam.iter())? != *fam {
                return Err(Error::InvalidInput("family members must be strictly ascending".into()));
            }
        }
        if pair.h.n() != pair.s.n() || pair.g.n() != pair.s.n() {
            return Err(Error::InvalidInput("ground sets of H, G and S differ".into()));
        }
        Ok(pair)
    }
}

/// One run of the algorithm with an already built blowup.
pub struct ContainerRunner<'b> {
    p: Poset,
    p_len: usize,
    b: &'b BlowupPoset,
    finder: CopyFinder<'b>,
}

impl<'b> ContainerRunner<'b> {
    pub fn new(b: &'b BlowupPoset, n: usize) -> Result<Self> {
        let p = b.source().clone();
        Ok(ContainerRunner { p, p_len: b.source_len(), b, finder: CopyFinder::new(b, n)? })
    }

    /// Runs the algorithm; returns `(H, G, stats)`.
    pub fn run(&self, s: &SetFamily, f: &SetFamily) -> Result<(SetFamily, SetFamily, RunStats)> {
        if f.n() != s.n() {
            return Err(Error::InvalidInput("F and S live on different ground sets".into()));
        }
        if !f.is_subfamily_of(s) {
            return Err(Error::Precondition("F must be a subfamily of S".into()));
        }
        if !is_p_free(f, &self.p) {
            return Err(Error::NotPFree { index: None });
        }
        let b = self.b;
        let m = self.p_len;
        let mut h = MaskSet::new(s.n());
        let mut g = MaskSet::from_family(s);
        let mut stats = RunStats::default();
        let mut resume: Option<Vec<u32>> = None;
        loop {
            let (found, search) = self.finder.find_with_stats(&g, resume.as_deref());
            stats.search_nodes += search.nodes;
            let Some(key) = found else { break };
            stats.iterations += 1;

            let top = key[0];
            if !f.contains(top) {
                g.remove(top);
                stats.step1 += 1;
                resume = Some(key);
                continue;
            }
            let mut q = vec![top];
            // r[i]: 1-based copy index chosen for ordering position i.
            let mut r = vec![0usize; m];
            r[0] = 1;
            let mut moved = false;
            for j in 1..m {
                let (k, _) = b.attachment(j + 1).unwrap();
                let group = b.group(j + 1, r[k - 1]);
                match group.clone().find(|&e| f.contains(key[e])) {
                    Some(e) => {
                        r[j] = b.label(e).r;
                        q.push(key[e]);
                    }
                    None => {
                        for &mask in &q {
                            h.insert(mask);
                            g.remove(mask);
                        }
                        for e in group {
                            g.remove(key[e]);
                        }
                        stats.step32 += 1;
                        moved = true;
                        break;
                    }
                }
            }
            if !moved {
                return Err(Error::NotPFree { index: None });
            }
            resume = Some(key);
        }
        Ok((h.to_family(), g.to_family(), stats))
    }
}

fn check_root(p: &Poset, x: usize) -> Result<()> {
    if x >= p.len() {
        return Err(Error::IndexOutOfRange { element: x, m: p.len() });
    }
    Ok(())
}

/// Container pair for `F ⊆ S` with respect to `P(x, t)`.
pub fn container_pair(p: &Poset, x: usize, t: usize, s: &SetFamily, f: &SetFamily) -> Result<ContainerPair> {
    check_root(p, x)?;
    let b = blowup(p, x, t)?;
    let runner = ContainerRunner::new(&b, s.n())?;
    let (h, g, stats) = runner.run(s, f)?;
    Ok(ContainerPair {
        h,
        g,
        poset: p.to_spec(),
        root: x,
        t,
        s: s.clone(),
        phases: vec![Phase { t, s_size: s.len() }],
        stats,
    })
}

/// Default second-phase factor `⌈log₂ n⌉`, at least 1.
pub fn default_t2(n: usize) -> usize {
    if n <= 2 {
        1
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Two runs: `S = 2^[n]` with `t1`, then `S = G_1` with `t2` on `F ∩ G_1`.
/// Returns `H = H_1 ∪ H_2` and `G = G_2`.
pub fn two_phase(p: &Poset, x: usize, n: usize, f: &SetFamily, t1: usize, t2: usize) -> Result<ContainerPair> {
    check_root(p, x)?;
    if f.n() != n {
        return Err(Error::InvalidInput(format!("family lives on [{}], expected [{n}]", f.n())));
    }
    let s = SetFamily::full(n);
    let first = container_pair(p, x, t1, &s, f)?;
    let rest = f.intersection(&first.g);
    let b2 = blowup(p, x, t2)?;
    let (h2, g2, stats2) = ContainerRunner::new(&b2, n)?.run(&first.g, &rest)?;
    let mut stats = first.stats;
    stats.add(&stats2);
    Ok(ContainerPair {
        h: first.h.union(&h2),
        g: g2,
        poset: p.to_spec(),
        root: x,
        t: t2,
        s,
        phases: vec![first.phases[0], Phase { t: t2, s_size: first.g.len() }],
        stats,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContainerCollection {
    /// Distinct pairs, keyed by `H`.
    pub pairs: BTreeMap<Vec<u32>, Vec<u32>>,
    /// For each input, its `(H, G)` in input order.
    pub per_input: Vec<(SetFamily, SetFamily)>,
    /// Inputs whose `H` had already been seen with a different `G`.
    pub collisions: Vec<usize>,
    pub max_h: usize,
    pub max_g: usize,
    /// `Σ_{i ≤ |P||S|/t} C(|S|, i)`, the number of possible certificates.
    pub certificate_bound: BigUint,
}

impl ContainerCollection {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn keys_unique(&self) -> bool {
        self.collisions.is_empty()
    }
}

/// Runs the algorithm on every input (in parallel) and merges the results in
/// input order.
pub fn build_collection(
    p: &Poset,
    x: usize,
    t: usize,
    s: &SetFamily,
    inputs: &[SetFamily],
) -> Result<ContainerCollection> {
    check_root(p, x)?;
    let b = blowup(p, x, t)?;
    let runner = ContainerRunner::new(&b, s.n())?;
    let results: Vec<Result<(SetFamily, SetFamily, RunStats)>> =
        inputs.par_iter().map(|f| runner.run(s, f)).collect();

    let mut pairs: BTreeMap<Vec<u32>, Vec<u32>> = BTreeMap::new();
    let mut per_input = Vec::with_capacity(inputs.len());
    let mut collisions = Vec::new();
    let (mut max_h, mut max_g) = (0, 0);
    for (idx, res) in results.into_iter().enumerate() {
        let (h, g, _) = res.map_err(|e| match e {
            Error::NotPFree { .. } => Error::NotPFree { index: Some(idx) },
            other => other,
        })?;
        max_h = max_h.max(h.len());
        max_g = max_g.max(g.len());
        match pairs.get(h.members()) {
            Some(prev) if prev.as_slice() != g.members() => collisions.push(idx),
            Some(_) => {}
            None => {
                pairs.insert(h.members().to_vec(), g.members().to_vec());
            }
        }
        per_input.push((h, g));
    }
    let limit = ((p.len() * s.len()) / t).min(s.len());
    let certificate_bound = (0..=limit).fold(BigUint::zero(), |acc, i| acc + binomial_big(s.len(), i));
    Ok(ContainerCollection { pairs, per_input, collisions, max_h, max_g, certificate_bound })
}

/// Clause-by-clause check of a pair against `F`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairReport {
    /// `H ⊆ F`.
    pub h_in_f: bool,
    /// `F ⊆ H ∪ G`.
    pub f_covered: bool,
    /// `H, G ⊆ S`.
    pub within_s: bool,
    /// `|H|` within the certificate bound.
    pub h_small: bool,
    /// `G` is `P(root, t)`-free.
    pub g_free: bool,
}

impl PairReport {
    /// Clause (i): `H ⊆ F ⊆ H ∪ G`.
    pub fn sandwich(&self) -> bool {
        self.h_in_f && self.f_covered
    }

    /// Clause (ii): small certificate and blowup-free residual.
    pub fn size_and_freeness(&self) -> bool {
        self.h_small && self.g_free
    }

    pub fn passed(&self) -> bool {
        self.sandwich() && self.size_and_freeness() && self.within_s
    }
}

pub fn verify_pair(pair: &ContainerPair, f: &SetFamily) -> Result<PairReport> {
    let p = Poset::from_spec(&pair.poset)?;
    let b = blowup(&p, pair.root, pair.t)?;
    let g_free = first_copy(&pair.g, &b)?.is_none();
    Ok(PairReport {
        h_in_f: pair.h.is_subfamily_of(f),
        f_covered: f.is_subfamily_of(&pair.h.union(&pair.g)),
        within_s: pair.h.is_subfamily_of(&pair.s) && pair.g.is_subfamily_of(&pair.s),
        h_small: pair.h.len() as f64 <= pair.h_bound() + 1e-9,
        g_free,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain2() -> Poset {
        Poset::chain(2)
    }

    #[test]
    fn step_one_only() {
        let s = SetFamily::full(2);
        let f = SetFamily::new(2, [1, 2]).unwrap();
        let pair = container_pair(&chain2(), 0, 2, &s, &f).unwrap();
        assert!(pair.h.is_empty());
        assert_eq!(pair.g.members(), &[1, 2, 3]);
        assert_eq!(pair.stats.step1, 1);
        assert!(verify_pair(&pair, &f).unwrap().passed());
    }

    #[test]
    fn step_three_two() {
        let s = SetFamily::full(2);
        let f = SetFamily::new(2, [0]).unwrap();
        let pair = container_pair(&chain2(), 0, 2, &s, &f).unwrap();
        assert_eq!(pair.h.members(), &[0]);
        assert_eq!(pair.g.members(), &[3]);
        assert_eq!(pair.stats.step32, 1);
        assert!(verify_pair(&pair, &f).unwrap().passed());
    }

    #[test]
    fn empty_family_gives_greedy_residual() {
        let s = SetFamily::full(3);
        let f = SetFamily::empty(3);
        let pair = container_pair(&chain2(), 0, 2, &s, &f).unwrap();
        assert!(pair.h.is_empty());
        assert!(verify_pair(&pair, &f).unwrap().passed());
        assert_eq!(pair.stats.step32, 0);
    }

    #[test]
    fn rejects_family_containing_p() {
        let s = SetFamily::full(2);
        let f = SetFamily::new(2, [0, 1]).unwrap();
        assert_eq!(
            container_pair(&chain2(), 0, 2, &s, &f).unwrap_err(),
            Error::NotPFree { index: None }
        );
    }

    #[test]
    fn two_phase_small() {
        let f = SetFamily::new(2, [1, 2]).unwrap();
        let pair = two_phase(&chain2(), 0, 2, &f, 2, 1).unwrap();
        assert_eq!(pair.h.members(), &[1]);
        assert_eq!(pair.g.members(), &[2]);
        assert!(is_p_free(&pair.g, &chain2()));
        assert!(verify_pair(&pair, &f).unwrap().passed());
        let empty = two_phase(&chain2(), 0, 2, &SetFamily::empty(2), 2, 1).unwrap();
        assert!(empty.h.is_empty());
    }

    #[test]
    fn default_second_factor() {
        let got: Vec<usize> = (1..=9).map(default_t2).collect();
        assert_eq!(got, vec![1, 1, 2, 2, 3, 3, 3, 3, 4]);
    }

    #[test]
    fn antichain_collection() {
        let s = SetFamily::full(2);
        let inputs: Vec<SetFamily> = [vec![], vec![0], vec![1], vec![2], vec![3], vec![1, 2]]
            .into_iter()
            .map(|m| SetFamily::new(2, m).unwrap())
            .collect();
        let c = build_collection(&chain2(), 0, 2, &s, &inputs).unwrap();
        assert!(c.len() <= 6);
        assert!(c.keys_unique());
        let empty = build_collection(&chain2(), 0, 2, &s, &[]).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn collection_reports_offending_input() {
        let s = SetFamily::full(2);
        let inputs = vec![SetFamily::new(2, [1]).unwrap(), SetFamily::new(2, [0, 3]).unwrap()];
        assert_eq!(
            build_collection(&chain2(), 0, 2, &s, &inputs).unwrap_err(),
            Error::NotPFree { index: Some(1) }
        );
    }

    #[test]
    fn tampered_pairs_fail() {
        let s = SetFamily::full(2);
        let f = SetFamily::new(2, [0]).unwrap();
        let pair = container_pair(&chain2(), 0, 2, &s, &f).unwrap();
        let mut lost = pair.clone();
        lost.h = SetFamily::empty(2);
        let report = verify_pair(&lost, &f).unwrap();
        assert!(!report.sandwich());

        let mut big = pair.clone();
        big.h = SetFamily::full(2);
        big.phases = vec![Phase { t: 2, s_size: 1 }];
        assert!(!verify_pair(&big, &f).unwrap().h_small);
    }

    #[test]
    fn json_round_trip() {
        let s = SetFamily::full(2);
        let f = SetFamily::new(2, [0]).unwrap();
        let pair = container_pair(&chain2(), 0, 2, &s, &f).unwrap();
        assert_eq!(ContainerPair::from_json(&pair.to_json()).unwrap(), pair);
    }
}
