use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("alphabet mismatch: {left:?} vs {right:?}")]
    AlphabetMismatch { left: Vec<String>, right: Vec<String> },

    #[error("sequence is not binary (alphabet {0:?})")]
    NotBinary(Vec<String>),

    #[error("scheme index {index} out of range (scheme has {len} cutoffs)")]
    SchemeIndex { index: usize, len: usize },

    #[error("inclusion-exclusion over {size} elements exceeds cap {cap}; truncate the set first")]
    CapExceeded { size: usize, cap: usize },

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
