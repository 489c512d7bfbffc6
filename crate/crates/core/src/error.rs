use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dissimilarity matrix: {0}")]
    InvalidMatrix(String),
    #[error("invalid medoid set: {0}")]
    InvalidMedoids(String),
    #[error("empty cluster")]
    EmptyCluster,
    #[error("need at least two medoids for swap-based optimization")]
    NeedTwoMedoids,
    #[error("candidate {0} is already a medoid")]
    CandidateIsMedoid(usize),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("graph is disconnected: no path between vertices {0} and {1}")]
    Disconnected(usize, usize),
    #[error("non-discriminative baseline: random mean {random_mean} <= optimum {optimum}")]
    NonDiscriminativeBaseline { random_mean: f64, optimum: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
