use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("spin count mismatch: {left} vs {right}")]
    SpinCountMismatch { left: usize, right: usize },

    #[error("matrix dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("spin count {n} exceeds the dense cap of {cap}")]
    SpinCountExceedsCap { n: usize, cap: usize },

    #[error("spin count must be at least {min}, got {n}")]
    SpinCountTooSmall { n: usize, min: usize },

    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("spin index {spin} out of range for {n} spins")]
    SpinOutOfRange { spin: usize, n: usize },

    #[error("spin subset must be nonempty")]
    EmptySubset,

    #[error("spin subset must be sorted, duplicate-free and within range: {0:?}")]
    InvalidSubset(Vec<usize>),

    #[error("subset cardinality must be odd, got {0}")]
    EvenSubset(usize),

    #[error("{context}: operator is not unitary (residual {residual:.3e})")]
    NotUnitary {
        context: &'static str,
        residual: f64,
    },

    #[error(
        "term has all factors in {{E, X}}, so its entry sum is nonzero and \
         the reflection identity does not apply"
    )]
    EntrySumNonzero,

    #[error("spin count must be even, got {0}")]
    OddSpinCount(usize),

    #[error(
        "gradient crusher is a filtering channel, not a unitary operation; \
         it has no dense matrix and cannot be compiled"
    )]
    CrusherNotUnitary,

    #[error("step kind cannot be evolved symbolically: {0}")]
    UnsupportedSymbolicStep(&'static str),

    #[error("angle must be finite, got {0}")]
    NonFiniteAngle(f64),

    #[error("malformed file: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
