use thiserror::Error;

/// Errors raised by the numerical routines and experiment drivers.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A quadrature did not reach its tolerance; `estimate` is the best value found.
    #[error("accuracy error in {what}: estimate {estimate:e} with error {error:e} (requested {requested:e})")]
    Accuracy {
        what: String,
        estimate: f64,
        error: f64,
        requested: f64,
    },

    /// The request exceeds the configured memory or size budget.
    #[error("resource limit: {0}")]
    Resource(String),

    /// The operation is not implemented for this dimension or configuration.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A value overflowed the range of `f64` even after log-space evaluation.
    #[error("overflow: {0}")]
    Overflow(String),

    #[error("invalid data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
