use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lacunary sequence: {0}")]
    InvalidSequence(String),
    #[error("invalid direction: {0}")]
    InvalidDirection(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
    #[error("empty direction set")]
    EmptyDirectionSet,
    #[error("missing norm estimate for segment {0}")]
    MissingEstimate(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("grid: {0}")]
    Grid(String),
    #[error("grid has {cells} cells, the brute-force oracle is limited to {limit}")]
    OracleGuard { cells: usize, limit: usize },
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("extent {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("input has zero norm")]
    ZeroNorm,
    #[error("format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
