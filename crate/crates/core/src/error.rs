use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("modulus {0} is outside the supported range")]
    Unsupported(u64),

    #[error("index {n} does not divide p - 1 = {}", .p - 1)]
    IndexNotDivisor { n: usize, p: u64 },

    #[error("residue {0} is zero; it belongs to no cyclotomic class")]
    ZeroResidue(u64),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("invalid plan: {0}")]
    InvalidPlan(String),

    #[error("sequence is not unimodularizable: entry {index} has magnitude {magnitude}")]
    NotUnimodularizable { index: usize, magnitude: f64 },

    #[error("zero sequence: normalization undefined")]
    ZeroSequence,

    #[error("empty codebook")]
    EmptyCodebook,

    #[error("FFT rounding deviation {deviation:e} exceeds threshold {threshold:e}")]
    Precision { deviation: f64, threshold: f64 },

    #[error("feedback polynomial is not primitive: period {period} instead of {expected}")]
    NotPrimitive { period: u64, expected: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
