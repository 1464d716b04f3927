//! Exact combinatorics for families of sets that avoid a fixed poset.
//!
//! Posets are given by their cover relations on `0..m`; families of subsets
//! of `[n]` are sorted lists of bitmasks. A family contains `P` when some
//! injective map sends every relation of `P` to a proper inclusion.

pub mod blowup;
pub mod caps;
pub mod census;
pub mod containers;
pub mod copies;
pub mod embedding;
pub mod error;
pub mod fixtures;
pub mod grading;
pub mod lattice;
pub mod poset;

pub use blowup::{blowup, blowup_size, BlowupPoset, CopyLabel, Direction};
pub use caps::Caps;
pub use census::{count_p_free, e_lower, la, random_p_free_family, container_experiment, CensusResult};
pub use containers::{build_collection, container_pair, two_phase, verify_pair, ContainerCollection, ContainerPair};
pub use embedding::{contains_poset, embed_via_marked_chains, first_copy, is_p_free, Embedding, MarkedOutcome};
pub use error::{Error, Result};
pub use grading::{graded_chain_cover, graded_completion, GradedChainCover, GradedCompletion};
pub use lattice::{ChainProfile, MarkedChain, MaskSet, SetFamily};
pub use poset::{LeafOrdering, Poset, PosetSpec};
