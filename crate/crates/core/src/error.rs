use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite coordinate {0}")]
    NonFinite(f64),

    #[error("index must be positive")]
    ZeroIndex,

    #[error("index {0} is out of the supported range")]
    IndexOutOfRange(u64),

    #[error("van der Corput base must be at least 2, got {0}")]
    InvalidBase(u64),

    #[error("log precision must be at least {min} bits, got {got}")]
    InvalidPrecision { min: u32, got: u32 },

    #[error("invalid sequence spec `{0}`")]
    InvalidSpec(String),

    #[error("{path}:{line}: {reason}")]
    PointFile { path: PathBuf, line: usize, reason: String },

    #[error("insufficient points: {path} holds {available}, {requested} requested")]
    InsufficientPoints {
        path: PathBuf,
        available: usize,
        requested: usize,
    },

    #[error("partition is empty")]
    EmptyPartition,

    #[error("mantissa {0} is already in the ledger")]
    DuplicateMantissa(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("nothing to emit")]
    EmptyTrajectory,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
