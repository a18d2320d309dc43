use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// One bad row in a Sentiment140 CSV or tab-separated asset file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordError {
    pub line: u64,
    pub message: String,
}

impl std::fmt::Display for RecordError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{origin}: {count} malformed record(s), first at {first}")]
    Malformed {
        origin: String,
        count: usize,
        first: RecordError,
        errors: Vec<RecordError>,
    },

    #[error("record {id}: polarity code {polarity} is not 0 (negative) or 4 (positive)")]
    InvalidPolarity { id: String, polarity: i64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error("training failed: {0}")]
    Training(String),

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

/// Coarse classification of failures, used by the command line for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Training,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidArgument(_) => ErrorKind::Usage,
            Error::Training(_) => ErrorKind::Training,
            _ => ErrorKind::Data,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn malformed(origin: impl Into<String>, errors: Vec<RecordError>) -> Self {
        Error::Malformed {
            origin: origin.into(),
            count: errors.len(),
            first: errors[0].clone(),
            errors,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! ensure_arg {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err($crate::error::Error::InvalidArgument(format!($($fmt)+)));
        }
    };
}
pub(crate) use ensure_arg;
