use thiserror::Error;

/// Errors produced by input validation across the crate.
///
/// Mathematical verdicts (rank deficiency, unequal partitions, failed
/// commutation) are never errors; they are reported in return values.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid bit character {0:?} (expected '0' or '1')")]
    InvalidBit(char),

    #[error("string length {len} exceeds the hard cap MAX_N = {max}")]
    TooLong { len: usize, max: usize },

    #[error("blocklength mismatch: expected {expected}, got {got}")]
    BlocklengthMismatch { expected: usize, got: usize },

    #[error("index {index} out of range [{min}, {max}]")]
    IndexOutOfRange { index: usize, min: usize, max: usize },

    #[error("invalid channel parameter: {0}")]
    InvalidParam(String),

    #[error("blocklength {n} out of range [{min}, {max}] for {what}")]
    BlocklengthOutOfRange {
        what: &'static str,
        n: usize,
        min: usize,
        max: usize,
    },

    #[error("composition of {0} with {1} is not representable")]
    UnsupportedComposition(&'static str, &'static str),

    #[error("not a permutation: {0}")]
    NotAPermutation(String),

    #[error("input map is not a bijection of {{0,1}}^{0}")]
    NotABijection(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
