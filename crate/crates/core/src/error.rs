use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge: error estimate {estimate:e} exceeds target {target:e}")]
    Quadrature { estimate: f64, target: f64 },

    #[error("node set needs at least {needed} points, got {got}")]
    TooFewNodes { needed: usize, got: usize },

    #[error("nodes {first} and {second} coincide")]
    DuplicateNodes { first: usize, second: usize },

    #[error("collocation matrix is not numerically positive definite (jitter {jitter:e} was tried)")]
    Factorization { jitter: f64 },

    #[error("node residual {residual:e} exceeds tolerance {tolerance:e} (condition estimate {condition:e})")]
    Residual { residual: f64, tolerance: f64, condition: f64 },

    #[error("solve for node set {index} failed: {source}")]
    NodeSetSolve {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("rate fit needs at least {needed} usable rows, found {found}")]
    TooFewRows { needed: usize, found: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("report parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of the numerics (solver or quadrature) rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Quadrature { .. } | Error::Factorization { .. } | Error::Residual { .. } => true,
            Error::NodeSetSolve { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
