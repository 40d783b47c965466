use thiserror::Error;

/// Failures raised while building or solving a rescaling problem.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid bounds [{a}, {b}]: need finite a < b")]
    InvalidBounds { a: f64, b: f64 },

    #[error("instance must have at least one coordinate")]
    Empty,

    #[error("length mismatch: x has {x} coordinates, delta has {delta}")]
    LengthMismatch { x: usize, delta: usize },

    #[error("non-finite value in {field} at index {index}")]
    NonFinite { field: &'static str, index: usize },

    #[error("x[{index}] = {value} lies outside [{a}, {b}]")]
    OutsideDomain {
        index: usize,
        value: f64,
        a: f64,
        b: f64,
    },

    #[error("eps must be finite and non-negative, got {0}")]
    InvalidEps(f64),

    #[error("norm order p must be finite and >= 1, got {0}")]
    InvalidNorm(f64),

    #[error("perturbation direction is zero")]
    ZeroDelta,

    #[error("target norm unreachable: at most {max_norm} is attainable")]
    Unreachable { max_norm: f64 },

    #[error("bisection did not reach tolerance within {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("eta is not differentiable at eps = 0")]
    DegenerateGradient,

    #[error("batch shape mismatch: {0}")]
    BatchShape(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
