use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index component {value} at mode {mode} is out of range (size {size})")]
    IndexOutOfRange {
        mode: usize,
        value: usize,
        size: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("degenerate model: {0}")]
    DegenerateModel(String),

    #[error("model corrupted: {0}")]
    ModelCorruption(String),

    #[error("evaluation budget exhausted")]
    BudgetExhausted,

    #[error("elite set is empty")]
    EmptyElites,

    #[error("unknown benchmark function `{0}`")]
    UnknownFunction(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialization(#[from] serde_json::Error),
}
