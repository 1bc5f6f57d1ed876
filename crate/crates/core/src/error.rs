//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("index out of bounds: {0}")]
    OutOfBounds(String),

    #[error("invalid rotation profile: {0}")]
    InvalidProfile(String),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("size cap exceeded: {0}")]
    SizeCap(String),

    #[error("construction overlap: {0}")]
    TileOverlap(String),

    /// A submatrix the construction guarantees invertible turned out singular,
    /// or the decoder could not select its equation block. Either means the
    /// inputs break the construction's invariants.
    #[error("invariant violation: {0}")]
    TheoryViolation(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
