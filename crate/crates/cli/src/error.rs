use std::fmt;

use stratify_core::Error;

/// Failure categories, each with its own exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Usage(String),
    Io(String),
    Integrity(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Integrity(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io(_) => "io",
            CliError::Integrity(_) => "integrity",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Integrity(m) => m,
        }
    }
}

/// Renders as `error[kind]: message` on a single line.
impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flat: Vec<&str> = self.message().split_whitespace().collect();
        write!(f, "error[{}]: {}", self.kind(), flat.join(" "))
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Parameter(_) => CliError::Usage(msg),
            Error::Io { .. } => CliError::Io(msg),
            Error::Bounds { .. } | Error::Integrity(_) | Error::Parse { .. } | Error::MissingGroundTruth => {
                CliError::Integrity(msg)
            }
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
