//! Size caps for the exponential procedures.
//!
//! Defaults can be overridden through the `POSET_CONTAINERS_CAPS`
//! environment variable, a comma separated list of `key=value` pairs, e.g.
//! `POSET_CONTAINERS_CAPS=blowup=20000,census_n=5`.

use crate::error::{Error, Result};

pub const CAPS_ENV: &str = "POSET_CONTAINERS_CAPS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Maximum number of elements of a constructed blowup.
    pub blowup: u128,
    /// Largest n for permutation iteration over maximal chains.
    pub exact_n: usize,
    /// Largest n for the lattice dynamic programs.
    pub dp_n: usize,
    /// Largest n accepted by `count_p_free`.
    pub census_n: usize,
    /// Largest n accepted by `la`.
    pub la_n: usize,
    /// Largest n_max accepted by `e_lower`.
    pub e_lower_n: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            blowup: 1_000_000,
            exact_n: 10,
            dp_n: 14,
            census_n: 5,
            la_n: 6,
            e_lower_n: 8,
        }
    }
}

impl Caps {
    /// Defaults with any overrides from the environment applied.
    pub fn from_env() -> Result<Self> {
        match std::env::var(CAPS_ENV) {
            Ok(spec) => Caps::default().with_overrides(&spec),
            Err(_) => Ok(Caps::default()),
        }
    }

    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("cap override `{item}` is not key=value")))?;
            let value: u128 = value
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("cap override `{item}` has a non-integer value")))?;
            let small = || usize::try_from(value).map_err(|_| Error::Parse(format!("cap `{item}` too large")));
            match key.trim() {
                "blowup" => self.blowup = value,
                "exact_n" => self.exact_n = small()?,
                "dp_n" => self.dp_n = small()?,
                "census_n" => self.census_n = small()?,
                "la_n" => self.la_n = small()?,
                "e_lower_n" => self.e_lower_n = small()?,
                other => return Err(Error::Parse(format!("unknown cap `{other}`"))),
            }
        }
        Ok(self)
    }
}
