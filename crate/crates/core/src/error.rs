use thiserror::Error;

/// Errors raised by the rough path algebra, the drivers and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("solver blow-up at step {step} (t = {time})")]
    BlowUp { step: usize, time: f64 },

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
