use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// `row` is 1-based over data rows (the header is not counted).
    #[error("parse error at row {row}, column \"{column}\": {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("label {label} at row {row} is outside 0..{n_classes}")]
    LabelOutOfRange {
        row: usize,
        label: usize,
        n_classes: usize,
    },

    #[error("MDA/OOB estimators require out-of-bag samples")]
    NoOobSamples,

    #[error("forest/dataset mismatch: {0}")]
    Fingerprint(String),

    #[error("replicate {index}: {source}")]
    Replicate {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
