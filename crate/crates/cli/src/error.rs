use std::fmt;

use etensor::Error;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or input; exit code 2.
    Usage(String),
    Unreadable(String),
    Parse(String),
    /// Failure while computing; exit code 1.
    Compute(String),
}

impl CliError {
    pub fn usage(e: Error) -> Self {
        match e {
            Error::Parse { .. } => CliError::Parse(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }

    pub fn compute(e: Error) -> Self {
        CliError::Compute(e.to_string())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Compute(_) => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Unreadable(m) => write!(f, "cannot read {m}"),
            // already carries the "parse error at line:col" prefix
            CliError::Parse(m) => f.write_str(m),
            CliError::Compute(m) => write!(f, "computation error: {m}"),
        }
    }
}
