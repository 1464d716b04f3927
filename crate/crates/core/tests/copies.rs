use posetfree::copies::CopyFinder;
use posetfree::{blowup, fixtures, BlowupPoset, MaskSet, Poset, SetFamily};
use proptest::prelude::*;

fn subset(a: u32, b: u32) -> bool {
    a != b && a & b == a
}

/// Every copy of the blowup in `members`, by plain injective search.
fn all_copies(b: &BlowupPoset, members: &[u32]) -> Vec<Vec<u32>> {
    let q = b.poset();
    let mut out = Vec::new();
    let mut img = Vec::new();
    fn go(q: &Poset, members: &[u32], img: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let e = img.len();
        if e == q.len() {
            out.push(img.clone());
            return;
        }
        for &v in members {
            if img.contains(&v) {
                continue;
            }
            let ok = q.lower_covers(e).iter().all(|&a| a >= e || subset(img[a], v))
                && q.upper_covers(e).iter().all(|&c| c >= e || subset(v, img[c]));
            if ok {
                img.push(v);
                go(q, members, img, out);
                img.pop();
            }
        }
    }
    go(q, members, &mut img, &mut out);
    out
}

/// Copies listing every sibling group in ascending order. Permuting a group
/// gives the same image set, so the search only reports these.
fn canonical(b: &BlowupPoset, c: &[u32]) -> bool {
    (2..=b.source_len()).all(|i| {
        (1..=b.group_count(i)).all(|k| {
            let g = b.group(i, k);
            c[g].windows(2).all(|w| w[0] < w[1])
        })
    })
}

fn cases() -> Vec<(Poset, usize)> {
    let mut v = Vec::new();
    for p in [fixtures::chain(2), fixtures::chain(3), fixtures::v(), fixtures::lambda(), fixtures::path4()] {
        for root in 0..p.len() {
            v.push((p.clone(), root));
        }
    }
    v
}

fn check(n: usize, bits: u64, case: usize, t: usize) -> Result<(), TestCaseError> {
    let (p, root) = &cases()[case];
    let b = blowup(p, *root, t).unwrap();
    if b.len() > 8 {
        return Ok(());
    }
    let members: Vec<u32> = (0..1u32 << n).filter(|&m| bits >> m & 1 == 1).collect();
    let family = SetFamily::new(n, members.iter().copied()).unwrap();
    let g = MaskSet::from_family(&family);
    let finder = CopyFinder::new(&b, n).unwrap();
    let copies: Vec<Vec<u32>> =
        all_copies(&b, &members).into_iter().filter(|c| canonical(&b, c)).collect();
    let least = copies.iter().min_by_key(|c| finder.key(c));
    let found = finder.find(&g, None);
    prop_assert_eq!(found.as_ref().map(|c| finder.key(c)), least.map(|c| finder.key(c)));
    if let Some(c) = &found {
        for (e, &v) in c.iter().enumerate() {
            prop_assert!(family.contains(v), "image of {} outside the family", e);
        }
    }
    // Resuming from any canonical copy gives the least copy whose internal prefix is
    // not below that copy's.
    let k = finder.internal_len();
    for from in copies.iter().step_by(7).take(6) {
        let lb = finder.key(from);
        let expect = copies
            .iter()
            .map(|c| finder.key(c))
            .filter(|key| key[..k] >= lb[..k])
            .min();
        let got = finder.find(&g, Some(from)).map(|c| finder.key(&c));
        prop_assert_eq!(got, expect);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn least_copy_matches_enumeration(
        n in 2usize..=4,
        bits in any::<u64>(),
        density in 0u32..3,
        case in 0usize..15,
        t in 1usize..=2,
    ) {
        // Denser families for small n so copies actually occur.
        let mut bits = bits;
        for _ in 0..density {
            bits |= bits.rotate_left(17);
        }
        let bits = bits & ((1u64 << (1 << n)) - 1);
        check(n, bits, case % cases().len(), t)?;
    }
}

#[test]
fn full_cube_small_cases() {
    for n in 2..=4 {
        for case in 0..cases().len() {
            check(n, (1u64 << (1 << n)) - 1, case, 2).unwrap();
        }
    }
}
