use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),
    /// The discretization is too coarse or too narrow for the requested accuracy.
    #[error("precision error: {0}")]
    Precision(String),
    /// An iterative method hit its iteration cap.
    #[error("convergence error: {0}")]
    Convergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn precision(msg: impl Into<String>) -> Error {
    Error::Precision(msg.into())
}
