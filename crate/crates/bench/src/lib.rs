//! Shared inputs for the benchmarks.

use posetfree::census::random_p_free_family;
use posetfree::{Poset, SetFamily};

/// Seeded `P`-free families on `[n]`, alternating between maximal ones and
/// thinned ones.
pub fn p_free_inputs(n: usize, p: &Poset, count: usize) -> Vec<SetFamily> {
    (0..count)
        .map(|i| {
            let keep = if i % 2 == 0 { 1.0 } else { 0.5 };
            random_p_free_family(n, p, i as u64, keep).expect("generator accepts tree posets")
        })
        .collect()
}

/// All sets of size `lo..=hi`.
pub fn band(n: usize, lo: usize, hi: usize) -> SetFamily {
    SetFamily::layers(n, lo..=hi)
}
