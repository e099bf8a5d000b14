use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node index {index} out of range for graph with {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error(
        "eligible pool exhausted after {reached} of {requested} linearly independent measurements"
    )]
    PoolExhausted { reached: usize, requested: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("sampling set is empty")]
    EmptySamplingSet,

    #[error("operation requires an undirected graph")]
    Directed,

    #[error("{0} did not converge")]
    NonConvergence(&'static str),

    #[error("sampling distribution is identically zero on the support")]
    ZeroDistribution,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
