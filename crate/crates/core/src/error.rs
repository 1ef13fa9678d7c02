use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("invalid configuration: {0}")]
    Configuration(String),

    #[error("capacity exceeded: {what} (limit {limit}, requested {requested})")]
    Capacity {
        what: &'static str,
        limit: usize,
        requested: usize,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// The linkage structure has no pair of variables from distinct groups.
    #[error("problem `{0}` has no independent variable pair")]
    NoIndependentPair(String),

    /// A schema cell received no samples in the population estimator.
    #[error("insufficient coverage: schema cell {cell} has no samples")]
    InsufficientCoverage { cell: String },

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("degenerate distribution: {0}")]
    DegenerateDistribution(String),

    #[error("reliability unreachable: no population size up to {cap} succeeded {required} consecutive runs")]
    UnreachableReliability { cap: usize, required: usize },

    #[error("collinear regressors: {}", columns.join(", "))]
    Collinearity { columns: Vec<String> },

    #[error("ingestion error: {0}")]
    Ingestion(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by user-supplied parameters rather than data.
    pub fn is_configuration(&self) -> bool {
        matches!(
            self,
            Error::Configuration(_) | Error::Parse(_) | Error::Capacity { .. } | Error::Argument(_)
        )
    }
}
