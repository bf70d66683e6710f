use std::path::PathBuf;

use thiserror::Error;

use crate::corpus::Label;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: record `{record}`: {message}")]
    Ingest {
        path: PathBuf,
        record: String,
        message: String,
    },

    #[error("{path}: line {line}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("duplicate id `{0}`")]
    DuplicateId(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("no {0} rows available")]
    MissingClass(Label),

    #[error("{stage} must not receive test data ({project})")]
    TestDataLeak { stage: &'static str, project: String },

    #[error("invalid hyperparameter `{name}` = {value}: {reason}")]
    InvalidParam { name: String, value: f64, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no baseline result for {0}")]
    MissingBaseline(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
