use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(critsense::Error),

    #[error("verification failed: {0}")]
    Verify(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Verify(_) => 3,
        }
    }
}

impl From<critsense::Error> for CliError {
    fn from(e: critsense::Error) -> Self {
        use critsense::Error as E;
        match e {
            E::TruncationNotConverged { .. } | E::RichardsonMismatch { .. } | E::NegativeQfi(_) => {
                CliError::Numerical(e)
            }
            other => CliError::Config(other.to_string()),
        }
    }
}
