//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {0} out of range")]
    InvalidQubit(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: corrupt record: {msg}")]
    CorruptRecord {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("unsupported format version {found}, expected {expected}")]
    FormatVersion { found: u32, expected: u32 },

    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
