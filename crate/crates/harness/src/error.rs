use std::fmt;

/// Harness failures, each mapped to a process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HarnessError {
    /// A checked property did not hold (exit 1).
    Property(String),
    /// Bad flags, config keys or parameter values (exit 2).
    Usage(String),
    /// Predicted work above the budget (exit 3).
    Budget(String),
    /// Exact fixed-width arithmetic would overflow (exit 4).
    Capacity(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Property(_) => 1,
            HarnessError::Usage(_) => 2,
            HarnessError::Budget(_) => 3,
            HarnessError::Capacity(_) => 4,
        }
    }
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::Property(m) => write!(f, "property failure: {m}"),
            HarnessError::Usage(m) => write!(f, "usage error: {m}"),
            HarnessError::Budget(m) => write!(f, "budget exceeded: {m}"),
            HarnessError::Capacity(m) => write!(f, "capacity exceeded: {m}"),
        }
    }
}

impl std::error::Error for HarnessError {}

impl From<fareycount::Error> for HarnessError {
    fn from(e: fareycount::Error) -> Self {
        match e {
            fareycount::Error::Domain(m) => HarnessError::Usage(m),
            fareycount::Error::Resource(m) => HarnessError::Budget(m),
            fareycount::Error::Capacity(m) => HarnessError::Capacity(m),
        }
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Usage(format!("i/o: {e}"))
    }
}

impl From<csv::Error> for HarnessError {
    fn from(e: csv::Error) -> Self {
        HarnessError::Usage(format!("csv: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
