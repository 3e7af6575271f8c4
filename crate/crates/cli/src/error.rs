use thiserror::Error;

/// Failures of a command, each mapped to a process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("integrity conflict: {0}")]
    Integrity(String),

    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => 2,
            Self::Resource(_) => 3,
            Self::Integrity(_) | Self::Failed(_) => 1,
        }
    }
}

impl From<riesz_core::Error> for CliError {
    fn from(e: riesz_core::Error) -> Self {
        use riesz_core::Error as E;
        match e {
            E::Resource(_) => Self::Resource(e.to_string()),
            E::Domain(_) | E::Unsupported(_) => Self::Usage(e.to_string()),
            other => Self::Failed(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
