//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the numerics, modulation, channel and simulation layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |M - M'| entry = {max_asymmetry:.3e}")]
    NotHermitian { max_asymmetry: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue = {min_eigenvalue:.6e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("matrix is singular within tolerance: offending eigenvalue = {eigenvalue:.6e}")]
    Singular { eigenvalue: f64 },

    #[error("dimension mismatch: {context}")]
    Dimension { context: String },

    #[error("operation `{op}` produced a non-finite entry")]
    NonFinite { op: &'static str },

    #[error("integrand is not finite at theta = {theta}")]
    IntegrandNotFinite { theta: f64 },

    #[error("quadrature rule needs at least 2 nodes, got {nodes}")]
    QuadratureOrder { nodes: usize },

    #[error("unsupported constellation `{name}` (expected bpsk, qpsk, qam8, qam16 or qam32)")]
    UnsupportedConstellation { name: String },

    #[error("bit label has wrong length: expected {expected} bits, got {actual}")]
    LabelLength { expected: usize, actual: usize },

    #[error("{what} index {value} out of range (must be < {bound})")]
    IndexOutOfRange {
        what: &'static str,
        value: usize,
        bound: usize,
    },

    #[error("invalid parameter `{name}`: {message}")]
    InvalidParameter { name: String, message: String },

    #[error("correlation bracket is negative ({value:.6e}); transmit correlation matrix is inconsistent")]
    NegativeBracket { value: f64 },

    #[error("config error{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Config { line: Option<usize>, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            message: message.into(),
        }
    }

    pub(crate) fn config(line: Option<usize>, message: impl Into<String>) -> Self {
        Error::Config {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
