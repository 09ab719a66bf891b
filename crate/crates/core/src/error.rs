use thiserror::Error;

use crate::exactnum::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("expected a positive rational, got {0}")]
    NonPositive(Rational),

    #[error("p-adic valuation of zero is undefined")]
    ZeroValuation,

    #[error("{0} is not prime")]
    NotPrime(String),

    #[error("no admissible prime above {lower} within {cap} candidates")]
    ScanCapExceeded { lower: String, cap: u64 },

    #[error("generator index {index} out of range (truncation has {len} generators)")]
    InvalidIndex { index: usize, len: usize },

    #[error("resource bound exceeded: {0}")]
    ResourceExhausted(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    /// A theorem-backed check failed. This is a bug, never an expected outcome.
    #[error("defect: {0}")]
    Defect(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("polynomials live in different algebras: {0}")]
    AmbientMismatch(String),

    #[error("chain breaks at step {step}: {reason}")]
    ChainBreak { step: usize, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
