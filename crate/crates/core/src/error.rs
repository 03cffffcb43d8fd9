use thiserror::Error;

/// Errors produced by the fractional-power pipeline and its building blocks.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not Hermitian: {0}")]
    NotHermitian(String),

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("malformed Matrix Market input at line {line}: {message}")]
    MatrixMarket { line: usize, message: String },

    #[error("cannot certify spectral bounds: {0}")]
    SpectralBounds(String),

    #[error("quadrature construction failed: {0}")]
    Quadrature(String),

    #[error("scalar error budget {budget:e} is unreachable: {reason}")]
    BudgetUnreachable { budget: f64, reason: String },

    #[error("tolerance below double-precision floor: epsilon = {epsilon:e}, floor = {floor:e}")]
    ToleranceBelowFloor { epsilon: f64, floor: f64 },

    #[error("shifted CG breakdown at iteration {iteration}: {reason}")]
    Breakdown { iteration: usize, reason: String },

    #[error("reference computation failed: {0}")]
    Oracle(String),

    #[error("oracle limit exceeded: n = {n} > {limit}")]
    OracleTooLarge { n: usize, limit: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
