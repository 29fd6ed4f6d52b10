use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An arithmetic or geometric precondition failed (inverting zero, zero base norm, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The caller passed inconsistent arguments.
    #[error("usage error: {0}")]
    Usage(String),

    /// A hypothesis required by the requested variant does not hold.
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("enumeration of {requested} items exceeds the cap of {cap}")]
    CapExceeded { requested: u128, cap: u64 },

    /// A quantity that must hold exactly (an inequality, an oracle match) failed.
    #[error("verification failed: {0}")]
    Violation(String),

    #[error("not found within budget: {0}")]
    NotFound(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
