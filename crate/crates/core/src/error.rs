use thiserror::Error;

use crate::space::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid space: {0}")]
    InvalidSpace(ValidationReport),

    #[error("index {index} out of range for a space of {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("duplicate index {0} in subset")]
    DuplicateIndex(usize),

    #[error("Hausdorff undefined for empty set")]
    EmptySubset,

    #[error("measure has {found} entries but the space has {expected} points")]
    MeasureLength { expected: usize, found: usize },

    #[error("mass at index {index} must be finite and nonnegative, got {value}")]
    InvalidMass { index: usize, value: f64 },

    #[error("{what}: {size} points exceeds the limit of {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("exhaustive search needs {required:e} evaluations, budget is {budget}")]
    BudgetExceeded { required: f64, budget: u64 },

    #[error("invalid correspondence: {0}")]
    InvalidCorrespondence(String),

    #[error("invalid cross metric: {0}")]
    InvalidCrossMetric(String),

    #[error("cross metric was built for different spaces")]
    SpaceMismatch,

    #[error("local search is needed for this pair but no seed was configured")]
    SeedRequired,

    #[error("invalid sampled function: {0}")]
    InvalidFunction(String),

    #[error("trees were coded on different grids")]
    GridMismatch,

    #[error("precompactness report needs a nonempty family")]
    EmptyFamily,

    #[error("invalid value for {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("non-finite number (NaN or infinity) in {0}")]
    NonFinite(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
