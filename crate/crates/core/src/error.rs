use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime in the supported range 2..=97")]
    InvalidPrime(u32),

    #[error("operands live in different rings: {0}")]
    RingMismatch(String),

    #[error("dimension {size} exceeds the configured cap {cap} ({what})")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),

    #[error("element is not invertible: {0}")]
    NotInvertible(String),

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("not a subgroup: {0}")]
    NotASubgroup(String),

    #[error("group action axiom violated: {0}")]
    ActionViolation(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid tower: {0}")]
    InvalidTower(String),

    #[error("level {level} out of range (tower has {depth} levels)")]
    LevelOutOfRange { level: usize, depth: usize },

    #[error("unknown name: {0}")]
    UnknownName(String),

    #[error("no witness: {0}")]
    NoWitness(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
