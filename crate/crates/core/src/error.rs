use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("state count must be at least 1")]
    ZeroStates,
    #[error("state {state} out of range for {n} states")]
    StateOutOfRange { state: u64, n: u32 },
    #[error("expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("empty word")]
    EmptyWord,
    #[error("tile rows must be nonempty and of equal length")]
    RaggedTile,
    #[error("tile is not simple")]
    NotSimple,
    #[error("{n}^{len} words exceed the index limit of {limit}")]
    IndexOverflow { n: u32, len: usize, limit: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("sample {index}: {source}")]
    Sample {
        index: u64,
        #[source]
        source: Box<Error>,
    },
    #[error("worker pool: {0}")]
    Pool(String),
}
