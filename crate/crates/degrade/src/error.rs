//! Crate-wide error type and exit-code mapping.

use std::path::PathBuf;

/// Errors produced by any part of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// File-system failure, with the path that caused it.
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Bytes that could not be decoded as PNG/JPEG, or an encode failure.
    #[error("image format error on {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    /// An operator or config was given an out-of-range parameter.
    #[error("parameter error: {0}")]
    Param(String),

    /// Malformed dataset manifest.
    #[error("manifest error: {0}")]
    Manifest(String),

    /// The external detector/transform process failed or died early.
    #[error("detector error: {0}")]
    Detector(String),

    /// The external process answered, but violated the wire protocol.
    #[error("protocol error: {0}")]
    Protocol(String),

    /// A metric is undefined for the given inputs (empty or single-class).
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    /// Bad benchmark configuration file.
    #[error("config error: {0}")]
    Config(String),

    /// Report files that cannot be merged.
    #[error("report merge error: {0}")]
    Merge(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            reason: reason.into(),
        }
    }

    /// Process exit status for this error: 2 for bad inputs, 3 for
    /// detector/protocol failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. }
            | Error::Format { .. }
            | Error::Param(_)
            | Error::Manifest(_)
            | Error::Config(_)
            | Error::Merge(_) => 2,
            Error::Detector(_) | Error::Protocol(_) => 3,
            Error::UndefinedMetric(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
