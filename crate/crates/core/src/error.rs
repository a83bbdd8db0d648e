use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quasimetric axiom violated at points ({first}, {second}): {reason}")]
    AxiomViolation {
        first: usize,
        second: usize,
        reason: String,
    },

    #[error("{} target point(s) not covered by the input balls: {uncovered:?}", uncovered.len())]
    Uncovered { uncovered: Vec<usize> },

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
