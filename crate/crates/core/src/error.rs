use std::path::PathBuf;

/// Errors raised by the numerical core.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("non-finite sample at index {0}")]
    NonFinite(usize),

    #[error("dilation by 2^{m} retains only {retention:.4} of the L2 mass")]
    MassLoss { m: i32, retention: f64 },

    #[error("inadequate sampling: {0}")]
    Sampling(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dyadic block {k} lies outside the resolvable band [{lo:.6}, {hi:.6}]")]
    OutOfBand { k: i32, lo: f64, hi: f64 },

    #[error("empty dyadic range")]
    EmptyRange,

    #[error("negative-order symbol is singular: |F(0)| = {0:e}")]
    SingularSymbol(f64),

    #[error("weight is not positive at {0:?}")]
    NonPositiveWeight(Vec<f64>),

    #[error("hypotheses not met (NOT_COVERED): {0}")]
    NotCovered(String),

    #[error("fit: {0}")]
    Fit(String),

    #[error("unknown model kind or parameters: {0}")]
    UnknownModel(String),

    #[error("malformed field dump: {0}")]
    Dump(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
