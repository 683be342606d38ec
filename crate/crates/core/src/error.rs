use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TractError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("formant extraction failed: found {found} peak(s), wanted {wanted}")]
    ExtractionFailure { found: usize, wanted: usize },

    #[error("degenerate hull: {0}")]
    DegenerateHull(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, TractError>;

pub(crate) fn invalid_input(msg: impl Into<String>) -> TractError {
    TractError::InvalidInput(msg.into())
}

pub(crate) fn invalid_config(msg: impl Into<String>) -> TractError {
    TractError::InvalidConfig(msg.into())
}
