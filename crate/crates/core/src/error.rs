use thiserror::Error;

/// Errors produced by grid, gauge, density and evolution operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("field length {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite value at node {0}")]
    NonFinite(usize),

    #[error("invalid floor {0}: relative floor must lie in (0, 1e-6]")]
    InvalidFloor(f64),

    #[error("field is identically zero")]
    AllZeroField,

    #[error("gauge parameter lambda must be nonzero and finite, got {0}")]
    InvalidLambda(f64),

    #[error("gauge parameter gamma must be finite, got {0}")]
    InvalidGamma(f64),

    #[error("lambda {lambda} is not admissible for the {class} class")]
    ClassViolation { lambda: f64, class: &'static str },

    #[error("cannot compose {outer} with {inner}: class mismatch")]
    ClassMismatch {
        outer: &'static str,
        inner: &'static str,
    },

    #[error("{0} transformation is not invertible within its class")]
    NotInvertible(&'static str),

    #[error("operation requires the {expected} class, got {got}")]
    WrongClass {
        expected: &'static str,
        got: &'static str,
    },

    #[error("modulus {modulus:e} is below the floor {floor:e}")]
    BelowFloor { modulus: f64, floor: f64 },

    #[error("operands live on different grids")]
    GridMismatch,

    #[error("diagonal entry {index} is not a nonnegative real ({value})")]
    NonPositiveDiagonal { index: usize, value: String },

    #[error("invalid mixing weights ({p1}, {p2})")]
    BadWeights { p1: f64, p2: f64 },

    #[error("operation requires a {0} grid")]
    UnsupportedBoundary(&'static str),

    #[error("singular tridiagonal system at row {0}")]
    SingularSolve(usize),

    #[error("trajectory has {0} states, at least 3 are required")]
    TrajectoryTooShort(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
