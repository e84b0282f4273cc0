use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violated a documented precondition.
    #[error("invalid input: {0}")]
    Validation(String),

    /// A dense construction would exceed the configured dimension cap.
    #[error("resource limit: {what} needs dimension {requested}, cap is {cap}")]
    ResourceLimit {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    /// A numerical routine failed to converge or lost too much precision.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The requested construction does not exist for this pair of states.
    #[error("unsupported case: {0}")]
    Unsupported(String),

    /// An iterative search hit its cap before reaching the goal.
    #[error("no termination after {iterations} iterations (last residual {residual:e})")]
    NonTermination { iterations: u64, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Validation(msg.into()))
}
