use std::fmt;
use std::io;

/// Failure of a command, split by exit status.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed input, bad flags or config: exit 2.
    Input(String),
    /// Input parsed but the mathematics is undefined for it: exit 3.
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Domain(_) => 3,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        CliError::Domain(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Domain(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<codashrink::Error> for CliError {
    fn from(e: codashrink::Error) -> Self {
        use codashrink::Error as E;
        match e {
            E::InvalidConfig { .. } | E::DimensionError { .. } => CliError::Input(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
