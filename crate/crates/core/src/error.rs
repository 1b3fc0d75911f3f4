use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degree sequence must be nonempty")]
    EmptyDegrees,
    #[error("degrees must be >= 1, got {0}")]
    InvalidDegree(i64),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("point has {got} coordinates but the polynomial has {want} variables")]
    DimensionMismatch { want: usize, got: usize },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic {0} out of range (must be a prime < 2^31)")]
    CharacteristicTooLarge(u64),
    #[error("inversion of zero in GF(q)")]
    ZeroInverse,
    #[error("size limit: {evaluations} point evaluations needed, ceiling is {ceiling}")]
    SizeLimit { evaluations: String, ceiling: u64 },
    #[error("variety `{label}`: {msg}")]
    InvalidVariety { label: String, msg: String },
    #[error("missing count for s = {0}")]
    MissingCount(u32),
    #[error("zeta reconstruction failed: insufficient degree bound or inconsistent counts ({0})")]
    Reconstruction(String),
    #[error("cache: {0}")]
    Cache(String),
    #[error("invalid example name `{0}`")]
    BadExampleName(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
