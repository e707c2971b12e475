use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Numeric(#[from] airybasis::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0} verification check(s) failed")]
    Verification(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            // Domain errors come from parameters the user supplied.
            CliError::Numeric(airybasis::Error::Domain(_)) => 1,
            CliError::Numeric(_) => 2,
            CliError::Io(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub(crate) fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
