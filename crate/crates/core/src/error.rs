use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("bitstring has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("{what}: requested {requested} exceeds limit {limit}")]
    LimitExceeded {
        what: &'static str,
        requested: u128,
        limit: u128,
    },
    #[error("k = {k} does not divide n = {n}")]
    NotDivisible { n: usize, k: usize },
    #[error("unknown compressor `{0}`")]
    UnknownCompressor(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
