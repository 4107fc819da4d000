use thiserror::Error;

/// Row or column axis of a matrix, used when reporting regularity failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Row,
    Column,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::Row => f.write_str("row"),
            Axis::Column => f.write_str("column"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix entry ({row}, {col}) is not 0 or 1")]
    NotZeroOne { row: usize, col: usize },

    /// `index` is 0-based; Display prints it 1-based.
    #[error("{axis} {} has sum {sum}, expected {expected}", .index + 1)]
    NotRegular {
        axis: Axis,
        index: usize,
        sum: usize,
        expected: usize,
    },

    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("complement of a {n}-regular digraph on {n} vertices has degree 0")]
    DegreeOverflow { n: usize },

    #[error("normalization needs 1 <= d <= n-1 (got n={n}, d={d})")]
    DegenerateScale { n: usize, d: usize },

    #[error("codegree needs two distinct vertices (got {} twice)", .0 + 1)]
    SameVertex(usize),

    #[error("index {} out of range for n={n}", .index + 1)]
    IndexOutOfRange { index: usize, n: usize },

    #[error("degree d={d} invalid for n={n}")]
    BadDegree { n: usize, d: usize },

    #[error("no regular matrix found in {tries} tries")]
    Exhausted { tries: u64 },

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("invalid switch spec: {0}")]
    InvalidSpec(String),

    #[error("coupling plan does not match this digraph: {0}")]
    PlanMismatch(String),

    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("expansion membership not established: {0}")]
    PrerequisiteMissing(String),

    #[error("vector is flat: residual {residual} <= rho")]
    IsFlat { residual: f64 },

    #[error("step vector is zero")]
    ZeroVector,

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("direct resolvent route is ill-conditioned (residual {residual:e})")]
    IllConditioned { residual: f64 },

    #[error("Bernoulli parameter p={0} outside (0,1)")]
    BadP(f64),

    #[error("bad test function: {0}")]
    BadFunctionSpec(String),

    #[error("shift matrix Z violates hypothesis: {0}")]
    InvalidZ(String),

    #[error("d = (1-delta) p n = {0} is not an integer")]
    NonIntegralD(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
