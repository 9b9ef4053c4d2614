use thiserror::Error;

/// Error type shared by all modules.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid argument or precondition violation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Matrix/vector dimensions do not match.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// A numerical procedure failed (non-convergence, overflow, NaN).
    #[error("numeric failure: {0}")]
    Numeric(String),
    /// Requested problem size exceeds what the dense representation supports.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// Operation requires structure the model does not have (e.g. a charge map).
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn dimension(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
    pub fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::UnsupportedModel(msg.into())
    }
}
