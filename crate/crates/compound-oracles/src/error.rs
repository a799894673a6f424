use thiserror::Error;

/// Errors produced by the library kernels.
///
/// The variants map onto the CLI exit-code contract: capacity violations exit
/// with code 3, everything else surfacing through a config path exits with
/// code 2.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside the family's parameter space.
    #[error("domain error: {0}")]
    Domain(String),

    /// A caller broke an API precondition (shape mismatch, bad rep count, ...).
    #[error("contract error: {0}")]
    Contract(String),

    /// The request exceeds a documented desk-scale capacity wall.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// A kernel lost all significant digits; the result would be noise.
    #[error("numeric error: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
}
