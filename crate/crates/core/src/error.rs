use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("not a permutation of 1..{len}: {reason}")]
    NotAPermutation { len: usize, reason: String },

    #[error("position {position} out of range for length {len}")]
    PositionOutOfRange { position: usize, len: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("pattern {pattern} is too short (length {len}, need at least {min})")]
    PatternTooShort { pattern: String, len: usize, min: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("malformed path: {0}")]
    MalformedPath(String),

    #[error("length {n} exceeds the enumeration budget of {limit}{hint}")]
    BudgetExceeded { n: usize, limit: usize, hint: &'static str },

    #[error("inexact series arithmetic: {0}")]
    InexactDivision(String),

    #[error("incomplete input: {0}")]
    IncompleteInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
