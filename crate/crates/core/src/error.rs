use thiserror::Error;

/// Errors produced by the depth kernels, matrix builders, and I/O helpers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("point {index} has a non-finite coordinate")]
    NonFinite { index: usize },

    #[error("duplicate point id {0}")]
    DuplicateId(u64),

    #[error("invalid locality grid: n = {n}, n0 = {n0}")]
    InvalidGrid { n: usize, n0: usize },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("weight vector has {found} levels, grid has {expected}")]
    WeightLength { expected: usize, found: usize },

    #[error("point {id} has a zero self-contribution in the PILD matrix")]
    ZeroDiagonal { id: u64 },

    #[error("group {group} has {size} points, at least {min} required")]
    GroupTooSmall { group: usize, size: usize, min: usize },

    #[error("invalid labels: {0}")]
    InvalidLabels(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("similarity value {value} at ({row}, {col}) is outside [0, 1]")]
    SimilarityOutOfRange { row: usize, col: usize, value: f64 },

    #[error("ground truth contains no outliers")]
    NoOutliers,

    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),

    #[error("{path}: line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: u64,
        column: String,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by malformed input or parameters rather than by a computation.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::ZeroDiagonal { .. } | Error::Io(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
