use thiserror::Error;

/// Errors produced anywhere in the assessment pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid time interval: {0} s (must be > 0)")]
    InvalidInterval(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("point is out of view: ({u}, {v})")]
    OutOfView { u: f64, v: f64 },

    #[error("JSON parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("validation error in `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("not found: {0}")]
    NotFound(String),

    #[error("no data: {0}")]
    NoData(String),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
