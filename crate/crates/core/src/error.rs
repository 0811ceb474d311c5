use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid device parameter `{name}`: {reason}")]
    InvalidParams { name: &'static str, reason: String },

    #[error("address out of bounds: {0}")]
    OutOfBounds(String),

    #[error("invalid scan #{index}: {reason}")]
    InvalidScan { index: usize, reason: String },

    #[error("media image geometry does not match the device")]
    MediaMismatch,

    #[error("capacity exceeded: need {needed} {unit}, device offers {available}")]
    Capacity {
        needed: u64,
        available: u64,
        unit: &'static str,
    },

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("workload profile is empty")]
    EmptyProfile,

    #[error("infeasible query shape: {0}")]
    InfeasibleShape(String),

    #[error("unknown placement `{0}`")]
    UnknownPlacement(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("plan text, line {line}: {reason}")]
    PlanParse { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
