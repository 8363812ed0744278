use thiserror::Error;

/// Errors produced by model construction, optimization and simulation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid channel model: {0}")]
    InvalidModel(String),
    #[error("thresholds must be strictly ascending")]
    NonAscendingThresholds,
    #[error("negative erasure half-width q = {0}")]
    NegativeQ(f64),
    #[error("no density crossing found between means {0} and {1}")]
    NoCrossing(f64, f64),
    #[error("derivative never changes sign up to q = {0} (degenerate SNR)")]
    NoSignChange(f64),
    #[error("ratio R = {r} unreachable before the adjacent mean (hard threshold {hard})")]
    RatioUnreachable { r: f64, hard: f64 },
    #[error("search grid too coarse: need at least 3 points per dimension, got {0}")]
    GridTooCoarse(usize),
    #[error("infeasible degree sequence: {0}")]
    InfeasibleDegrees(String),
    #[error("message length {got} does not match code dimension {expected}")]
    MessageLength { got: usize, expected: usize },
    #[error("LLR vector length {got} does not match code length {expected}")]
    LlrLength { got: usize, expected: usize },
    #[error("density evolution bisection brackets disagree (non-monotone family)")]
    NonMonotoneFamily,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("malformed alist: {0}")]
    MalformedAlist(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
