use scpdc_core::Error as CoreError;

/// Command failure, mapped onto the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_INVALID: u8 = 3;
pub const EXIT_SOLVER: u8 = 4;
pub const EXIT_MAX_ITER: u8 = 5;
pub const EXIT_IO: u8 = 6;

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::Solver(_) => EXIT_SOLVER,
            CliError::Io(_) => EXIT_IO,
        }
    }

    pub fn io(path: &std::path::Path, e: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InnerSolve(_) | CoreError::EigenNotConverged { .. } => {
                CliError::Solver(e.to_string())
            }
            _ => CliError::Invalid(e.to_string()),
        }
    }
}
