use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] rcf_core::Error),
    #[error("certification undetermined: {0}")]
    Undetermined(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 2,
            CliError::Core(rcf_core::Error::Resource(_)) => 5,
            CliError::Core(_) => 3,
            CliError::Undetermined(_) => 4,
            CliError::Io(_) => 1,
        })
    }
}

pub type CliResult<T> = Result<T, CliError>;
