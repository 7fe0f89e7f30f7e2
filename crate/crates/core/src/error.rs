use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("divergent integral: {0}")]
    Divergent(String),
    #[error("singular linear system: {0}")]
    Singular(String),
    #[error("did not converge: {0}")]
    NoConvergence(String),
    #[error("numerically unstable: {0}")]
    Unstable(String),
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by the caller (bad arguments, parameters
    /// outside a hypothesis, IO), as opposed to a numerical method failing
    /// on valid input.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_) | Error::Hypothesis(_) | Error::Io(_) | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
