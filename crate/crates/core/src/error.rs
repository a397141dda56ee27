use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("side-information size s={s} outside [2, N-1] for N={n} (N must be at least 3)")]
    Domain { n: usize, s: usize },

    #[error("offset a={a} outside [0, {n})")]
    Offset { n: usize, a: usize },

    #[error("user {user} demands message {message}, which is already in its side information")]
    DemandOverlap { user: usize, message: usize },

    #[error("user {user} demands message {message}, which does not exist")]
    DemandOutOfRange { user: usize, message: usize },

    #[error("user {user} has an empty demand set")]
    EmptyDemand { user: usize },

    #[error("{len} cannot be split into {z} equal byte-aligned blocks")]
    BlockAlignment { len: usize, z: usize },

    #[error("index {index} out of range (limit {limit})")]
    Index { index: usize, limit: usize },

    #[error("construction does not apply: s={s}, N={n}")]
    CaseMismatch { n: usize, s: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("coded symbol {id} is missing from the schedule")]
    MissingSymbol { id: String },

    #[error("user {user} needs block x_{message}^{block}, which is not in its side information")]
    SideInfoGap {
        user: usize,
        message: usize,
        block: usize,
    },

    #[error("user {user} could not recover block x_{message}^{block}")]
    DecodeFailure {
        user: usize,
        message: usize,
        block: usize,
    },

    #[error("malformed symbol id {0:?}")]
    SymbolId(String),
}
