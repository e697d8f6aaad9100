use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unreadable file {path}: {reason}")]
    Unreadable { path: PathBuf, reason: String },

    #[error("multi-channel WAV ({channels} channels) in {path}; only mono is supported")]
    MultiChannel { path: PathBuf, channels: u16 },

    #[error("zero-length signal")]
    ZeroLength,

    #[error("degenerate calibration: {0}")]
    DegenerateCalibration(String),

    #[error("insufficient data for pitch: need {needed} samples, got {got}")]
    InsufficientPitchData { needed: usize, got: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("band radius {radius} too narrow for length difference {diff}")]
    BandTooNarrow { radius: usize, diff: usize },

    #[error("invalid distance matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("requested {requested} clusters but only {available} items")]
    TooManyClusters { requested: usize, available: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("stage `{stage}` failed for {item}: {source}")]
    Stage {
        stage: &'static str,
        item: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 1 for bad parameters, 2 for bad or unusable data.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_) => 1,
            Error::Stage { source, .. } => source.exit_code(),
            _ => 2,
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str, item: impl Into<String>) -> Self {
        Error::Stage {
            stage,
            item: item.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
