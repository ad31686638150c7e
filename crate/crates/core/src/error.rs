use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension d = {0}: need d >= 2")]
    InvalidDimension(u32),

    #[error("invalid copy count n = {0}: need n >= 1")]
    InvalidCopies(u32),

    #[error("invalid prior p = {0}: need 0 < p < 1")]
    InvalidPrior(String),

    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix dimension {dim} exceeds the dense cap {cap}")]
    SizeCap { dim: usize, cap: usize },

    #[error("matrix is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| = {diff:e}")]
    NotSymmetric { row: usize, col: usize, diff: f64 },

    #[error("shape {shape:?} does not match matrix dimension {dim}")]
    ShapeMismatch { shape: Vec<usize>, dim: usize },

    #[error("not a density matrix: {0}")]
    NotAState(String),

    #[error("not a POVM element: {0}")]
    NotAnEffect(String),

    #[error("not a probability distribution: {0}")]
    NotADistribution(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("primal point is infeasible: {0}")]
    PrimalInfeasible(String),

    #[error("dual point is infeasible: {0}")]
    DualInfeasible(String),

    #[error("linear program is infeasible")]
    LpInfeasible,

    #[error("linear program is unbounded (entering column {0})")]
    LpUnbounded(usize),

    #[error("simplex did not terminate within {0} pivots")]
    IterationLimit(usize),

    #[error("cannot parse rational {0:?}")]
    ParseRational(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("internal check failed: {0}")]
    CheckFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
