use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("{op}: shape mismatch: {message}")]
    ShapeMismatch { op: &'static str, message: String },

    #[error("{op}: non-finite value produced")]
    NonFinite { op: &'static str },

    #[error("masked softmax row {row} has no allowed entries")]
    AllMaskedRow { row: usize },

    #[error("softmax temperature must be positive, got {0}")]
    NonPositiveTemperature(f64),

    #[error("backward requires a scalar (1x1) loss, got {rows}x{cols}")]
    NonScalarLoss { rows: usize, cols: usize },

    #[error("unknown parameter {0:?}")]
    UnknownParam(String),

    #[error("duplicate parameter {0:?}")]
    DuplicateParam(String),

    #[error("non-finite gradient for parameter {0:?}")]
    NonFiniteGradient(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("checkpoint {path}:{line}: {message}")]
    Checkpoint {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

impl NumericsError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        NumericsError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn shape(op: &'static str, message: impl Into<String>) -> Self {
        NumericsError::ShapeMismatch {
            op,
            message: message.into(),
        }
    }
}
