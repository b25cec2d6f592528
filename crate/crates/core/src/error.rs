use thiserror::Error;

/// Failure modes shared by every counting and number-theoretic operation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the operation's domain (zero modulus, composite prime, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// The predicted work or memory exceeds the configured budget.
    #[error("resource error: {0}")]
    Resource(String),
    /// An exact fixed-width intermediate would overflow.
    #[error("capacity error: {0}")]
    Capacity(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn overflow(what: &str) -> Error {
    Error::Capacity(format!("{what} overflows fixed-width exact arithmetic"))
}
