use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Schema { path: String, message: String },

    #[error("unsupported schema version {found} (expected {expected})")]
    UnsupportedSchemaVersion { found: u64, expected: u64 },

    #[error("artifact failed validation:\n{}", .0.join("\n"))]
    Validation(Vec<String>),

    #[error("canonical name collision: {0}")]
    NameCollision(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Backend(#[from] BackendError),

    #[error("{0}")]
    Eval(String),
}

/// Errors raised by chat-completion backends.
#[derive(Debug, Error)]
pub enum BackendError {
    #[error("backend configuration error: {0}")]
    Config(String),

    #[error("transport failure after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },

    #[error("backend returned malformed response: {0}")]
    BadResponse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}
