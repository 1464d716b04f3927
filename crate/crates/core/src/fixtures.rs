//! Named example posets and seeded random tree posets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::grading::graded_completion;
use crate::poset::{Poset, PosetSpec};

pub fn chain(k: usize) -> Poset {
    Poset::chain(k)
}

/// One bottom below two tops.
pub fn v() -> Poset {
    Poset::new(3, &[(0, 1), (0, 2)]).unwrap()
}

/// One top above two bottoms.
pub fn lambda() -> Poset {
    Poset::new(3, &[(1, 0), (2, 0)]).unwrap()
}

/// `a < c > b < d`.
pub fn n_poset() -> Poset {
    Poset::new(4, &[(0, 2), (1, 2), (1, 3)]).unwrap()
}

/// Two bottoms below a centre below two tops.
pub fn x() -> Poset {
    Poset::new(5, &[(0, 2), (1, 2), (2, 3), (2, 4)]).unwrap()
}

/// Two bottoms each below two tops; not a tree.
pub fn butterfly() -> Poset {
    Poset::new(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap()
}

/// The four-element path `x_2 < x_1 > x_3 < x_4` rooted at `x_1 = 0`.
pub fn path4() -> Poset {
    Poset::new(4, &[(1, 0), (2, 0), (2, 3)]).unwrap()
}

/// A random tree poset on `m` elements: element `i > 0` joins a random
/// earlier element, above or below it with equal probability.
pub fn random_tree(m: usize, seed: u64) -> Poset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let covers: Vec<(usize, usize)> = (1..m)
        .map(|i| {
            let j = rng.gen_range(0..i);
            if rng.gen_bool(0.5) {
                (j, i)
            } else {
                (i, j)
            }
        })
        .collect();
    Poset::new(m, &covers).expect("a tree Hasse diagram is always reduced")
}

/// A random graded tree poset with at most `max_m` elements, obtained by
/// completing small random trees until one fits.
pub fn random_graded_tree(max_m: usize, seed: u64) -> Poset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let m = rng.gen_range(1..=max_m.clamp(1, 7));
        let p = random_tree(m, rng.gen());
        let hat = graded_completion(&p).expect("trees have completions").hat;
        if hat.len() <= max_m {
            return hat;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fixture {
    pub name: String,
    pub poset: PosetSpec,
    pub tree: bool,
    pub graded: bool,
    pub height: usize,
}

impl Fixture {
    fn new(name: impl Into<String>, p: &Poset) -> Self {
        Fixture {
            name: name.into(),
            poset: p.to_spec(),
            tree: p.is_tree(),
            graded: p.is_graded(),
            height: p.height(),
        }
    }

    pub fn poset(&self) -> Poset {
        Poset::from_spec(&self.poset).expect("fixtures are valid")
    }
}

/// The named posets plus `random` seeded random tree posets.
pub fn corpus(random: usize, seed: u64) -> Vec<Fixture> {
    let mut out: Vec<Fixture> = (1..=5).map(|k| Fixture::new(format!("chain{k}"), &chain(k))).collect();
    out.push(Fixture::new("v", &v()));
    out.push(Fixture::new("lambda", &lambda()));
    out.push(Fixture::new("n", &n_poset()));
    out.push(Fixture::new("x", &x()));
    out.push(Fixture::new("butterfly", &butterfly()));
    out.push(Fixture::new("path4", &path4()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..random {
        let m = rng.gen_range(1..=8);
        out.push(Fixture::new(format!("random{i}"), &random_tree(m, rng.gen())));
    }
    out
}

pub fn by_name(name: &str) -> Option<Poset> {
    corpus(0, 0).into_iter().find(|f| f.name == name).map(|f| f.poset())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_match() {
        for f in corpus(30, 7) {
            let p = f.poset();
            assert_eq!(f.tree, p.is_tree(), "{}", f.name);
            assert_eq!(f.graded, p.is_graded(), "{}", f.name);
            if f.name.starts_with("random") {
                assert!(f.tree);
            }
        }
        assert!(!by_name("butterfly").unwrap().is_tree());
        assert!(by_name("x").unwrap().is_graded());
        assert!(!by_name("path4").unwrap().is_graded() || by_name("path4").unwrap().height() == 2);
    }

    #[test]
    fn random_graded() {
        for seed in 0..50 {
            let p = random_graded_tree(10, seed);
            assert!(p.len() <= 10 && p.is_tree() && p.is_graded());
        }
    }

    #[test]
    fn reproducible() {
        assert_eq!(random_tree(8, 3).covers(), random_tree(8, 3).covers());
    }
}
