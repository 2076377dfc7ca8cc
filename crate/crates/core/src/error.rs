use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("illegal move {from} -> {to}: {reason}")]
    IllegalMove {
        from: usize,
        to: usize,
        reason: String,
    },

    #[error("move sequence fails at step {index}: {reason}")]
    VerificationFailure { index: usize, reason: String },

    #[error("dimension {0} is above the supported limit")]
    UnsupportedDimension(u32),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("configuration is not coverable")]
    NotCoverable,

    #[error("search budget exhausted")]
    BudgetExceeded,

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
