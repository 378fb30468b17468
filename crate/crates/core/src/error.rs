use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CrtError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("index {index} out of range for axis of length {len}")]
    Index { index: usize, len: usize },
    #[error("axis mismatch: {0}")]
    AxisMismatch(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid phantom spec: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, CrtError>;
