use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to parse document")]
    Parse(#[from] serde_json::Error),

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("vertex index {index} out of range for graph with {n} vertices")]
    VertexOutOfRange { index: usize, n: usize },

    #[error("function has {got} values but the graph has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },

    #[error("function must be strictly positive, found {value} at vertex {vertex}")]
    NonPositive { vertex: usize, value: f64 },

    #[error("invalid generator parameters for {family}: {reason}")]
    InvalidGenerator { family: String, reason: String },

    #[error("unknown psi function `{0}` (expected log, sqrt, id or pow:<alpha>)")]
    UnknownPsi(String),

    #[error("psi function `{name}`: {reason}")]
    InvalidPsi { name: String, reason: String },

    #[error("dimension must be positive, got {0}")]
    InvalidDimension(f64),

    #[error("invalid condition: {0}")]
    InvalidCondition(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("epsilon schedule cannot keep 1 + eps*f positive")]
    EpsilonSchedule,
}
