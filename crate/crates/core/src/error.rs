use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid row sums: {0}")]
    InvalidRowSums(String),

    #[error("instance needs {cells} table cells, budget is {budget}")]
    CapacityExceeded { cells: u128, budget: u64 },

    #[error("outside brute-force guardrail: {0}")]
    Guardrail(String),

    #[error("total entry sum {0} is odd")]
    OddTotal(u64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid diagonal: {0}")]
    InvalidDiagonal(String),

    #[error("dilation {m} does not make row {row} integral")]
    Integrality { m: u64, row: usize },

    #[error("need at least two nonzero entries in the volume sequence, found {0}")]
    InsufficientEntries(usize),

    #[error("sample count must be positive")]
    ZeroSamples,

    #[error("no hits in the reference diagonal")]
    ZeroHits,

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("cache file {0} is locked by another process")]
    CacheLocked(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
