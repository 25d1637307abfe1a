use thiserror::Error;

/// Errors raised anywhere in the modeling and benchmarking pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("correlation matrix is singular even with nugget {nugget:e}; the design is degenerate")]
    SingularCorrelation { nugget: f64 },

    #[error("degenerate hierarchical trend: F'R^-1 F = {0:e} is not positive")]
    DegenerateTrend(f64),

    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("R^2 undefined for constant validation responses (rmse = {rmse}, mae = {mae})")]
    UndefinedR2 { rmse: f64, mae: f64 },

    #[error("hyperparameter tuning failed: {0}")]
    TuningFailed(String),

    #[error("unknown problem id `{0}`")]
    UnknownProblem(String),

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
