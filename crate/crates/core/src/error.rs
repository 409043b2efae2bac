use thiserror::Error;

/// Errors raised while loading, validating or querying knowledge bases and scenarios.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed json: {0}")]
    Json(#[from] serde_json::Error),

    /// Structural problem in a knowledge-base file, with the offending location.
    #[error("knowledge base: {0}")]
    Parse(String),

    /// Scenario field failed validation; `path` names the field (e.g. `goals[3].importance`).
    #[error("scenario: {path}: {message}")]
    Validation { path: String, message: String },

    #[error("{kind} index {index} out of range (have {len})")]
    Index {
        kind: &'static str,
        index: usize,
        len: usize,
    },

    #[error("{0}")]
    Mismatch(String),

    /// Operation not allowed in the current consultation state.
    #[error("{0}")]
    State(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }
}
