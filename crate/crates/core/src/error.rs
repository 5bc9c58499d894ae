//! Error types shared across the library.

use std::path::PathBuf;

/// Coarse classification used by callers (e.g. the CLI) to map failures to
/// exit codes: problems with input data versus problems inside a model run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Unreadable, malformed, or semantically invalid input data.
    Data,
    /// A model could not produce a usable output on otherwise valid input.
    Model,
}

/// Unified error type for dataset handling, ranking, models, indicators,
/// and statistics.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// I/O failure while reading or writing a file.
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Structurally malformed CSV (ragged rows, bad encoding, ...).
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    /// A release, ranking, budget, or statistics input failed validation.
    /// The message names the offending row, column, or id.
    #[error("{0}")]
    InvalidData(String),

    /// A model failed on valid input (degenerate clustering, eigensolver
    /// non-convergence, ...).
    #[error("{0}")]
    Model(String),
}

impl Error {
    /// Convenience constructor for validation failures.
    pub fn data(msg: impl Into<String>) -> Self {
        Error::InvalidData(msg.into())
    }

    /// Convenience constructor for model failures.
    pub fn model(msg: impl Into<String>) -> Self {
        Error::Model(msg.into())
    }

    /// Which coarse class this error belongs to.
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. } | Error::Csv { .. } | Error::InvalidData(_) => ErrorKind::Data,
            Error::Model(_) => ErrorKind::Model,
        }
    }
}

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
