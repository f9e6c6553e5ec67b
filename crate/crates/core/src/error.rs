use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("metric axiom violated: {0}")]
    MetricViolation(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("constant inconsistency: {0}")]
    ConstantInconsistency(String),

    #[error("search failed: {0}")]
    SearchFailed(String),

    #[error("linear solve failed: {0}")]
    SolveFailed(String),

    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
