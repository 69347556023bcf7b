use thiserror::Error;

/// Errors produced by mesh construction, discretization and the study driver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("problem violates b - a'/2 > 0 (minimum {0:e})")]
    NotCoercive(f64),

    #[error("penalty coefficient beta0 at node {node} is {value:e}; must be positive")]
    NonPositivePenalty { node: usize, value: f64 },

    #[error("singular pivot in row {row} (pivot ratio {ratio:e})")]
    SingularMatrix { row: usize, ratio: f64 },

    #[error("solve failed: relative residual {residual:e} exceeds {tolerance:e}")]
    Inaccurate { residual: f64, tolerance: f64 },

    #[error("{0} requires the derivative of the reference function")]
    MissingDerivative(&'static str),

    #[error("degree/mesh mismatch: {0}")]
    Mismatch(String),

    #[error("degenerate quotient: {0}")]
    Degenerate(String),

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("report format: {0}")]
    Format(String),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
