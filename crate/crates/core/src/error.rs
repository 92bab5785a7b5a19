use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scoring vector: {0}")]
    InvalidScoringVector(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("instance carries no score for the preferred candidate")]
    MissingPreferredScore,

    #[error("{0} requires an unweighted instance")]
    RequiresUnweighted(&'static str),

    #[error("invalid manipulation matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid fractional solution: {0}")]
    InvalidSolution(String),

    #[error("candidate {0} has no configuration to sample from")]
    EmptySupport(usize),

    #[error("search space exceeds limits: {0}")]
    LimitsExceeded(String),

    #[error("lp solver failure: {0}")]
    Solver(String),

    #[error("column cap of {cap} exceeded for candidate {candidate} at bound {bound}")]
    ColumnCap {
        candidate: usize,
        cap: usize,
        bound: u64,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
