use thiserror::Error;

/// Errors raised by the engine. Variants follow the failure kinds named by
/// each technique's contract so callers can match on them.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid data: {0}")]
    InvalidData(String),
    #[error("target layer was never reached")]
    TargetNotReached,
    #[error("training failure: {0}")]
    TrainingFailure(String),
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("placement failure after {0} attempts")]
    PlacementFailure(usize),
    #[error("permission denied: {0}")]
    PermissionDenied(String),
    #[error("drop {0} is not visible to the actor")]
    NotVisible(u64),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid_arg(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn invalid_data(msg: impl Into<String>) -> Error {
    Error::InvalidData(msg.into())
}
