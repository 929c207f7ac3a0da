use std::path::PathBuf;
use std::time::Duration;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: malformed JSON: {source}")]
    Parse {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    /// A value violates a documented invariant. The message names the invariant.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("provider timed out after {0:?}")]
    Timeout(Duration),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("empty control set")]
    EmptyControlSet,

    #[error("invalid mode '{0}' (expected ours, no_vlm or baseline)")]
    InvalidMode(String),

    #[error("unknown parameter '{0}'")]
    UnknownParameter(String),

    #[error("{0}")]
    Image(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(context: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Parse {
            context: context.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
