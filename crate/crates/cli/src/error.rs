use thiserror::Error;

/// Failures mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Core(#[from] hotelling::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("enumeration refused: {candidates} candidate profiles exceed the budget of {budget}")]
    Budget { candidates: u128, budget: u128 },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Budget { .. } => crate::EXIT_BUDGET,
            _ => crate::EXIT_USAGE,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}
