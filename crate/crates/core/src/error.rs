use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Domain,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("matrix is not Hermitian: |M[{row}][{col}] - conj(M[{col}][{row}])| = {deviation:e}")]
    NotHermitian { row: usize, col: usize, deviation: f64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("operator norm {norm} exceeds 1; renormalize the input (e.g. --normalize)")]
    NormTooLarge { norm: f64 },
    #[error("spectral gap violated for gap {gap}: offending eigenvalues {offending:?}")]
    GapViolation { gap: f64, offending: Vec<f64> },
    #[error("ill-conditioned: smallest singular value {sigma_min:e} is below {threshold:e}")]
    IllConditioned { sigma_min: f64, threshold: f64 },
    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { what: &'static str, iterations: usize, residual: f64 },
    #[error("internal consistency: {0}")]
    Consistency(String),
    #[error("factorization identity fails at x = {x}: residual {residual:e}")]
    Factorization { x: f64, residual: f64 },
    #[error("inconsistent (f, h) pair at degree {degree}: |f_q / h_(q-1)| = {ratio}")]
    InconsistentPair { degree: usize, ratio: f64 },
    #[error("phase recursion failed: {0}")]
    Recursion(String),
    #[error("phase round-trip check failed: max deviation {max_dev:e} at x = {x}")]
    RoundTrip { x: f64, max_dev: f64 },
    #[error("degree error: {0}")]
    Degree(String),
    #[error("phase composition error: {0}")]
    Composition(String),
    #[error("count overflows 128-bit integers: {0}")]
    BigCount(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Input(_) | Error::Shape(_) | Error::Degree(_) | Error::Composition(_) => {
                ErrorKind::Input
            }
            Error::NotHermitian { .. }
            | Error::Domain(_)
            | Error::NormTooLarge { .. }
            | Error::GapViolation { .. }
            | Error::IllConditioned { .. } => ErrorKind::Domain,
            Error::NoConvergence { .. }
            | Error::Consistency(_)
            | Error::Factorization { .. }
            | Error::InconsistentPair { .. }
            | Error::Recursion(_)
            | Error::RoundTrip { .. }
            | Error::BigCount(_) => ErrorKind::Numeric,
        }
    }
}
