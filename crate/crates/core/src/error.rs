use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad input: wrong row shape, wrong ordering for the requested class, unknown id.
    #[error("usage error: {0}")]
    Usage(String),

    /// An enumeration or evaluation budget ran out before completion.
    #[error("resource budget exceeded: {0}")]
    Budget(String),

    /// An internal invariant did not hold. Always a bug.
    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn budget(msg: impl Into<String>) -> Self {
        Error::Budget(msg.into())
    }
}
