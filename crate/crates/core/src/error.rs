//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("matrix exponential argument out of range: ||A t||_inf = {norm:.3e} exceeds {limit}")]
    ExpOutOfRange { norm: f64, limit: f64 },

    #[error("integer overflow computing {0}")]
    Overflow(String),

    #[error("polynomial is not univariate in variable {var}")]
    NotUnivariate { var: usize },

    #[error("basis mismatch: expected (n={expected_n}, m={expected_m}), got (n={got_n}, m={got_m})")]
    BasisMismatch {
        expected_n: usize,
        expected_m: usize,
        got_n: usize,
        got_m: usize,
    },

    #[error("polynomial degree {degree} exceeds basis degree {max}")]
    DegreeTooHigh { degree: usize, max: usize },

    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("degenerate Gram matrix: condition estimate {cond:.3e} exceeds {limit:.1e}")]
    DegenerateGram { cond: f64, limit: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
