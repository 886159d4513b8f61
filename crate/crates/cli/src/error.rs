use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),

    #[error(transparent)]
    Infeasible(#[from] tverberg_core::Error),

    #[error("input digest mismatch: certificate has {expected}, input has {found}")]
    DigestMismatch { expected: String, found: String },

    #[error("{failed} of {total} checks failed")]
    VerifyFailed { failed: usize, total: usize },

    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::DigestMismatch { .. } => 4,
            CliError::VerifyFailed { .. } | CliError::Io(_) => 1,
        }
    }
}
