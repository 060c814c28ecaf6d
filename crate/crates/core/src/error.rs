use thiserror::Error;

/// Errors raised by evaluators, constructors and searches.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vector of length {len} exceeds dimension {dim}")]
    DimensionMismatch { len: usize, dim: usize },

    #[error("invalid exponent {0}: exponents must lie in (0, inf]")]
    InvalidExponent(f64),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("space is not rearrangement invariant: {0}")]
    NotSymmetric(String),

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("sequence too short: need {need} terms, have {have}")]
    InsufficientLength { need: usize, have: usize },

    #[error("enumeration budget exceeded: {needed} evaluations requested, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("witness for m={m} evaluates to {actual}, report says {reported}")]
    WitnessMismatch { m: usize, reported: f64, actual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
