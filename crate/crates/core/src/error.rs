use thiserror::Error;

use crate::tree::Label;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("newick parse error at byte {pos}: {msg}")]
    NewickParse { pos: usize, msg: String },

    #[error("cycle notation parse error: {0}")]
    CycleParse(String),

    #[error("duplicate label {0}")]
    DuplicateLabel(Label),

    #[error("element {0} is not in the ground set")]
    OutsideGroundSet(Label),

    #[error("label {0} is outside the permutation domain")]
    OutsideDomain(Label),

    #[error("labels must be positive integers, got {0}")]
    InvalidLabel(Label),

    #[error("permutation domain is empty")]
    EmptyDomain,

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("tree is not fixed by the permutation")]
    NotFixed,

    #[error("permutation is not a single cycle")]
    NotSingleCycle,

    #[error("{0} is not a power of two")]
    NotPowerOfTwo(u64),

    #[error("permutation has a single cycle; nothing can be removed")]
    SingleCycle,

    #[error("cycle type {0} is not binary, so no tree is fixed (empty support)")]
    EmptySupport(String),

    #[error("edge index {0} is out of range")]
    InvalidEdge(usize),

    #[error("label {0} already occurs in the tree")]
    LabelCollision(Label),

    #[error("inserted cycle of size {cycle} is smaller than an existing cycle of size {existing}")]
    CycleTooSmall { cycle: u64, existing: u64 },

    #[error("{what}: size {given} exceeds the guard of {max}")]
    GuardExceeded {
        what: &'static str,
        given: usize,
        max: usize,
    },

    #[error("distribution has empty support")]
    EmptySupportDistribution,

    #[error("table was built for (n={n}, k={k}); request needs (n={want_n}, k={want_k})")]
    TableMismatch { n: usize, k: u32, want_n: usize, want_k: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;
