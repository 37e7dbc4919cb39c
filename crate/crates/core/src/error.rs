use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, DoeError>;

#[derive(Debug, Error)]
pub enum DoeError {
    /// Inputs violate a structural rule (duplicate names, bad levels, unknown factors).
    #[error("validation error: {0}")]
    Validation(String),

    /// A guard on problem size was exceeded.
    #[error("capacity error: {what} is {got}, limit is {limit}")]
    Capacity {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    /// An effect could not be estimated, usually because a contrast group is empty.
    #[error("estimation error: {0}")]
    Estimation(String),

    /// Malformed CSV or JSON input. `row` is 1-based and counts the header as row 1.
    #[error("parse error at row {row}{}: {message}", column.as_ref().map(|c| format!(", column {c}")).unwrap_or_default())]
    Parse {
        row: usize,
        column: Option<String>,
        message: String,
    },

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl DoeError {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        DoeError::Validation(msg.into())
    }

    pub(crate) fn estimation(msg: impl Into<String>) -> Self {
        DoeError::Estimation(msg.into())
    }

    pub(crate) fn parse(row: usize, column: Option<&str>, msg: impl Into<String>) -> Self {
        DoeError::Parse {
            row,
            column: column.map(str::to_owned),
            message: msg.into(),
        }
    }

    pub fn is_io(&self) -> bool {
        matches!(self, DoeError::Io { .. })
    }
}
