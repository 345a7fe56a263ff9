use std::fmt;

use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    Dimension { left: usize, right: usize },

    #[error("invalid restriction pattern: {0}")]
    Pattern(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("capacity exceeded: {what} supports n <= {max}, got n = {n}")]
    Capacity {
        what: &'static str,
        n: usize,
        max: usize,
    },

    #[error("non-finite value at index {0}")]
    Numeric(usize),

    #[error("operation undefined on an empty family: {0}")]
    EmptyFamily(&'static str),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn domain(msg: impl fmt::Display) -> Self {
        Error::Domain(msg.to_string())
    }

    pub(crate) fn pattern(msg: impl fmt::Display) -> Self {
        Error::Pattern(msg.to_string())
    }

    pub(crate) fn dims(left: usize, right: usize) -> Result<()> {
        if left == right {
            Ok(())
        } else {
            Err(Error::Dimension { left, right })
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
