use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("element {element} out of range for a poset on {m} elements")]
    IndexOutOfRange { element: usize, m: usize },
    #[error("duplicate cover pair ({0}, {1})")]
    DuplicateCover(usize, usize),
    #[error("cover relation contains a directed cycle through element {0}")]
    Cycle(usize),
    #[error("cover pair ({0}, {1}) is implied transitively")]
    NotReduced(usize, usize),
    #[error("poset is not a tree poset")]
    NotTree,
    #[error("poset is not graded")]
    NotGraded,
    #[error("poset is a chain")]
    IsChain,
    #[error("{what} has size {size}, exceeding the cap {cap}")]
    Size { what: &'static str, size: u128, cap: u128 },
    #[error("{what}: n = {n} exceeds the exact-mode cap {cap}")]
    TooLarge { what: &'static str, n: usize, cap: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("input family contains the forbidden poset{}", index.map(|i| format!(" (input {i})")).unwrap_or_default())]
    NotPFree { index: Option<usize> },
    #[error("invalid marked chain {index}: {reason}")]
    InvalidMarkedChain { index: usize, reason: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
