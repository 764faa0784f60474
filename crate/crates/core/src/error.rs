use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    #[error("{path}: no records found")]
    EmptyInput { path: String },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("unknown user id '{0}'")]
    UnknownUser(String),

    #[error("unknown item id '{0}'")]
    UnknownItem(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("{path}: bad artifact: {msg}")]
    Artifact { path: String, msg: String },

    #[error("artifact was built from a different dataset: expected fingerprint {expected}, got {actual}")]
    FingerprintMismatch { expected: String, actual: String },

    #[error("item universes differ: {0}")]
    UniverseMismatch(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn parse(path: impl Into<String>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { path: path.into(), line, msg: msg.into() }
    }

    pub fn artifact(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Artifact { path: path.into(), msg: msg.into() }
    }
}
