use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid face {vertices:?} for n = {n}: {reason}")]
    InvalidFace {
        vertices: Vec<u32>,
        n: u32,
        reason: &'static str,
    },
    #[error("face rank {rank} out of range for n = {n}, d = {d} (there are {count} faces)")]
    RankOutOfRange { rank: u64, n: u32, d: u32, count: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("weight law is not continuous: {0}")]
    DiscontinuousLaw(String),
    #[error("c = {c} lies below the threshold c_* = {c_star}")]
    BelowThreshold { c: f64, c_star: f64 },
    #[error("face {0} was already revealed")]
    DoubleReveal(u64),
    #[error("{0}")]
    Unsupported(String),
    #[error("malformed complex document: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
