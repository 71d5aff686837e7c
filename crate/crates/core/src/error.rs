use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("{path}: malformed raster at byte {offset}: {reason}")]
    MalformedRaster {
        path: PathBuf,
        offset: usize,
        reason: String,
    },

    #[error("{path}: unsupported channel layout: {reason}")]
    UnsupportedChannels { path: PathBuf, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("invalid keypoint instance: {0}")]
    InvalidInstance(String),

    #[error("expected {expected} skeleton, found {found}")]
    WrongSkeleton {
        expected: &'static str,
        found: &'static str,
    },

    #[error("frame id mismatch: ground truth {gt:?} vs prediction {pred:?}")]
    FrameMismatch { gt: String, pred: String },

    #[error("unevaluable instance: {0}")]
    Unevaluable(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("unknown subset label {0:?}")]
    UnknownSubset(String),

    #[error("unpaired descriptor ids: {}", .0.join(", "))]
    MissingPairing(Vec<String>),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("training diverged at step {step}: non-finite loss")]
    Diverged { step: usize },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
