use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension N = {0} is below 3")]
    DimensionTooSmall(usize),
    #[error("Hardy coefficient {value} outside the admissible range ({lower}, {upper})")]
    HardyOutOfRange { value: f64, lower: f64, upper: f64 },
    #[error("coupling exponents alpha = {alpha}, beta = {beta} must exceed 1 and sum to {critical}")]
    ExponentMismatch { alpha: f64, beta: f64, critical: f64 },
    #[error("coupling strength must be finite, got {0}")]
    BadCoupling(f64),
    #[error("bad grid: {0}")]
    BadGrid(String),
    #[error("sample vector has length {got}, grid has {expected} points")]
    LengthMismatch { expected: usize, got: usize },
    #[error("profiles live on different grids")]
    GridMismatch,
    #[error("profile contains non-finite values")]
    NonFinite,
    #[error("profile is identically zero")]
    ZeroProfile,
    #[error("state cannot be scaled onto the Nehari set: {0}")]
    NotProjectable(String),
    #[error("Nehari system matrix is singular (det = {0:e})")]
    Singular(f64),
    #[error("solvability condition for negative coupling fails: lhs = {lhs:e}, rhs = {rhs:e}")]
    ConditionFailed { lhs: f64, rhs: f64 },
    #[error("no sign change found for the scaling equation up to t = {0:e}")]
    NoBracket(f64),
    #[error("no positive root of the k-l system was found")]
    NoRoot,
    #[error("parameters outside the regime of the closed form: {0}")]
    OutOfRegime(String),
    #[error("every multistart run failed: {0:?}")]
    AllStartsFailed(Vec<String>),
    #[error("empty coupling list")]
    EmptyScan,
    #[error("invalid solver options: {0}")]
    InvalidOptions(String),
    #[error("state is not recentered: peak sits {0} cells from the grid midpoint")]
    NotRecentered(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
