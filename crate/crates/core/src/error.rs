use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("fourier index {k} out of range for a grid of {grid} samples")]
    Aliasing { k: i64, grid: usize },
    #[error("quadrature did not converge: estimated error {error_estimate:e} for value {value:e}")]
    Quadrature { value: f64, error_estimate: f64 },
    #[error("eigensolver budget exhausted after {iterations} iterations")]
    NoConvergence { iterations: usize, best: Vec<f64> },
    #[error("matrix is not Hermitian: max |A - A*| = {0:e}")]
    NotHermitian(f64),
    #[error("estimation window empty: {0}")]
    EmptyWindow(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

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

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
