use thiserror::Error;

/// Failures of a command, each with a fixed exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] pvidim::Error),
    #[error("soundness violation: {0}")]
    Soundness(String),
}

impl CliError {
    /// 2 bad input, 3 budget exceeded, 4 internal or soundness failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io { .. } => 2,
            CliError::Core(e) => match e {
                pvidim::Error::FaceBudget { .. } | pvidim::Error::OracleGuard { .. } => 3,
                pvidim::Error::Internal(_) => 4,
                _ => 2,
            },
            CliError::Soundness(_) => 4,
        }
    }
}
