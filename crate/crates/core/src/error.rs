use thiserror::Error;

/// Failure modes shared by every computation in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the mathematical domain of the requested quantity.
    #[error("domain error: {0}")]
    Domain(String),

    /// A root could not be bracketed or the iteration produced a non-finite value.
    #[error("convergence error: {0}")]
    Convergence(String),

    /// An l-sum hit its term cap before the tail bound was met.
    #[error("series not converged after {terms} terms")]
    Truncation { terms: usize },

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    /// Reading or writing an output file failed.
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
