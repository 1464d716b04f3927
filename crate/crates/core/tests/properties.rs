use posetfree::census::{count_p_free, random_p_free_family};
use posetfree::containers::{container_pair, two_phase, verify_pair};
use posetfree::embedding::{contains_poset, is_p_free};
use posetfree::grading::{graded_chain_cover, graded_completion, verify_chain_cover, verify_completion};
use posetfree::{blowup, blowup_size, fixtures, Poset, SetFamily};
use proptest::prelude::*;

const NAMED: [&str; 7] = ["chain2", "chain3", "v", "lambda", "x", "path4", "n"];

fn named(i: usize) -> Poset {
    fixtures::by_name(NAMED[i % NAMED.len()]).unwrap()
}

fn family(n: usize, bits: u64) -> SetFamily {
    SetFamily::new(n, (0..1u32 << n).filter(|&m| bits >> m & 1 == 1)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn complement_dualizes(i in 0usize..20, n in 1usize..=4, bits in any::<u64>(), seed in any::<u64>()) {
        let p = if i < NAMED.len() { named(i) } else { fixtures::random_tree(5, seed) };
        let f = family(n, bits);
        prop_assert_eq!(
            contains_poset(&f, &p).is_some(),
            contains_poset(&f.complement_map(), &p.dual()).is_some()
        );
        prop_assert_eq!(f.complement_map().complement_map(), f);
    }

    #[test]
    fn blowups_keep_grading(seed in any::<u64>(), root in 0usize..10, t in 1usize..=3) {
        let p = fixtures::random_graded_tree(7, seed);
        let root = root % p.len();
        let b = blowup(&p, root, t).unwrap();
        prop_assert_eq!(blowup_size(&p, root, t).unwrap(), b.len() as u128);
        prop_assert!(b.poset().is_graded());
        prop_assert!(b.poset().is_tree());
        prop_assert_eq!(b.poset().height(), p.height());
    }

    #[test]
    fn completions_are_graded_trees(seed in any::<u64>(), m in 1usize..=10) {
        let p = fixtures::random_tree(m, seed);
        let c = graded_completion(&p).unwrap();
        prop_assert!(verify_completion(&p, &c));
        prop_assert!(c.hat.is_graded() && c.hat.is_tree());
        prop_assert_eq!(c.hat.height(), p.height());
        prop_assert!(c.within_bound());
        let cover = graded_chain_cover(&c.hat).unwrap();
        prop_assert!(verify_chain_cover(&c.hat, &cover).passed());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn container_pairs_sandwich(
        i in 0usize..NAMED.len(),
        n in 2usize..=6,
        seed in any::<u64>(),
        keep in 0.1f64..1.0,
        root in 0usize..5,
        t in 1usize..=4,
    ) {
        let p = named(i);
        let root = root % p.len();
        let f = random_p_free_family(n, &p, seed, keep).unwrap();
        prop_assert!(is_p_free(&f, &p));
        let s = SetFamily::full(n);
        let pair = container_pair(&p, root, t, &s, &f).unwrap();
        prop_assert!(verify_pair(&pair, &f).unwrap().passed());
        prop_assert_eq!(&pair, &container_pair(&p, root, t, &s, &f).unwrap());
        prop_assert!(pair.h.len() as f64 <= pair.h_bound());

        let phased = two_phase(&p, root, n, &f, t.max(2), 2).unwrap();
        let first = container_pair(&p, root, t.max(2), &s, &f).unwrap();
        prop_assert!(phased.g.is_subfamily_of(&first.g));
        prop_assert!(verify_pair(&phased, &f).unwrap().passed());
    }
}

#[test]
fn counts_are_dual_invariant() {
    for name in NAMED {
        let p = fixtures::by_name(name).unwrap();
        for n in 0..=3 {
            assert_eq!(count_p_free(n, &p).unwrap(), count_p_free(n, &p.dual()).unwrap(), "{name} n={n}");
        }
    }
}
