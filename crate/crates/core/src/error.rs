use thiserror::Error;

/// Errors raised by the model, the distance computations and the chamber walks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("weight vector is empty")]
    EmptyWeights,

    #[error("weight #{index} is {value}; weights must be finite and strictly positive")]
    InvalidWeight { index: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("not a permutation of 1..={n}: {detail}")]
    NotAPermutation { n: usize, detail: String },

    #[error("label {label} out of range 1..={n}")]
    LabelOutOfRange { label: usize, n: usize },

    #[error("label {0} repeated")]
    RepeatedLabel(usize),

    #[error("weights sum to {sum}, expected 1 within {tolerance:e}")]
    NotNormalized { sum: f64, tolerance: f64 },

    #[error("k = {k} must satisfy {min} <= k <= {n}")]
    InvalidK { k: usize, min: usize, n: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} too large: {size} exceeds the cap of {cap}")]
    TooLarge { what: &'static str, size: usize, cap: usize },

    #[error("stationary system is singular: {0}")]
    Singular(String),

    #[error("tolerance not met: {0}")]
    ToleranceNotMet(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
