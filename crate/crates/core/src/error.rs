use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GmeError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The input admits no usable candidate, e.g. every weighted overlap in a
    /// probability update vanished.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
}

pub type Result<T, E = GmeError> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(GmeError::InvalidArgument(msg.into()))
}
