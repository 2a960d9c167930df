use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("formula is not basic: {0}")]
    NotBasic(String),
    #[error("agent sets differ")]
    AgentMismatch,
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("model is not in class {0}")]
    ClassViolation(String),
    #[error("resource budget exhausted")]
    ResourceExhausted,
    #[error("normal form conversion failed: {0}")]
    NotConverted(String),
    #[error("{0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
