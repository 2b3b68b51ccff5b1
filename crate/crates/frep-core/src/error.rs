//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FrepError {
    #[error("generator index {index} out of range for k = {k}")]
    GeneratorOutOfRange { index: usize, k: usize },

    #[error("generator count k = {0} is not supported (need 2 <= k <= 26)")]
    BadGeneratorCount(usize),

    #[error("word {0:?} is not reduced")]
    UnreducedWord(String),

    #[error("cannot parse word character {0:?}")]
    BadWordCharacter(char),

    #[error("generator counts differ: {0} vs {1}")]
    GeneratorCountMismatch(usize, usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix for generator {index} is not unitary: defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    NonUnitary { index: usize, defect: f64, tol: f64 },

    #[error("matrix for generator {index} is {rows}x{cols}, expected square of dimension {expected}")]
    BadMatrixShape {
        index: usize,
        rows: usize,
        cols: usize,
        expected: usize,
    },

    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,

    #[error("probe index {index} out of range (sequence has {len} vectors)")]
    ProbeOutOfRange { index: usize, len: usize },

    #[error("query requires an algebra element f but none was supplied")]
    MissingElement,

    #[error("delta must be positive, got {0}")]
    NonPositiveDelta(f64),

    #[error("{context}: representation is reducible (commutant dimension {commutant_dim})")]
    ReducibleInput {
        context: &'static str,
        commutant_dim: usize,
    },

    #[error("ball of radius {radius} for k = {k} has {words} words, above the supported maximum {max}")]
    BallTooLarge {
        k: usize,
        radius: usize,
        words: u64,
        max: u64,
    },

    #[error("invalid argument: {0}")]
    BadArgument(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, FrepError>;
