use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid mapping: {0}")]
    InvalidMapping(String),

    #[error("invalid pair: {0}")]
    InvalidPair(String),

    #[error("missing dataset file: {0}")]
    MissingFile(String),

    #[error("{path}:{line}: parse error: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("line {line}: invalid pair record: {message}")]
    InvalidRecord { line: usize, message: String },

    #[error("label {0} not covered by the vocabulary")]
    UnknownLabel(u32),

    #[error("{0}")]
    Encoding(String),
}

impl GraphError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        GraphError::Io {
            path: path.into(),
            source,
        }
    }
}
