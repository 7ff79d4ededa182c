use thiserror::Error;

/// Errors raised by the solvers, generators and the instance loader.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A caller-supplied argument violates an operation's precondition.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The operation is well defined but not supported for this input
    /// (for example the length of an oblique segment).
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("malformed rational literal {literal:?}: {reason}")]
    Rational { literal: String, reason: String },

    #[error("segment {index} has negative weight {weight}")]
    NegativeWeight { index: usize, weight: String },

    #[error("segment index {index} out of range (instance has {len} segments)")]
    IndexOutOfRange { index: usize, len: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
