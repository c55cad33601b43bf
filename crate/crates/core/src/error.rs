//! Error types shared across the library.

use thiserror::Error;

/// Errors produced by evaluation, inversion, and CM testing.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A precision requirement was not met (requested or certified bits too low).
    #[error("precision error: {0}")]
    Precision(String),

    /// A certified bound of the algorithm would be violated.
    #[error("certification error: {0}")]
    Certification(String),

    /// An iteration failed to converge within its budget.
    #[error("convergence error: {0}")]
    Convergence(String),

    /// A derivative vanished at working precision during Newton iteration.
    #[error("numerical error: derivative is zero at working precision")]
    ZeroDerivative,

    /// Rational reconstruction could not produce a consistent quadratic form.
    #[error("inconsistency error: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub(crate) fn precision(msg: impl Into<String>) -> Self {
        Error::Precision(msg.into())
    }
    pub(crate) fn certification(msg: impl Into<String>) -> Self {
        Error::Certification(msg.into())
    }
    pub(crate) fn convergence(msg: impl Into<String>) -> Self {
        Error::Convergence(msg.into())
    }
}
