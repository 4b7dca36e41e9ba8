use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the requested function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Arguments are individually valid but do not fit together (grid mismatch, m > n, ...).
    #[error("usage error: {0}")]
    Usage(String),

    /// A subspace construction produced the wrong numerical rank.
    #[error("construction error: expected rank {expected}, found {found}; singular values {singular_values:?}")]
    Construction {
        expected: usize,
        found: usize,
        singular_values: Vec<f64>,
    },

    /// A numerical routine broke down (negative conditional density, failed decomposition).
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("not in the image of the s-map: {0}")]
    NotInImage(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
