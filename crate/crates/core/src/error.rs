use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value {value} in {context}")]
    NonFinite { context: &'static str, value: f64 },

    #[error("invalid hyperparameter: {0}")]
    InvalidParams(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quantile sketch has not absorbed any observation")]
    Unseeded,

    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },

    #[error("expected {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("node {0} is not a splittable leaf")]
    NotALeaf(usize),

    #[error("malformed tree buffer: {0}")]
    Format(String),

    #[error("{path}:{line}: {msg}")]
    Csv {
        path: PathBuf,
        line: u64,
        msg: String,
    },

    #[error("column {0} not found")]
    MissingColumn(String),

    #[error("stream is empty")]
    EmptyStream,

    #[error("sample {0} is not flagged for training")]
    NotTraining(usize),

    #[error("bundle is full (capacity {0})")]
    BundleFull(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
