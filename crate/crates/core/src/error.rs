use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("atoms and weights differ in length ({atoms} vs {weights})")]
    LengthMismatch { atoms: usize, weights: usize },

    #[error("negative weight {weight} at position {index}")]
    NegativeWeight { index: usize, weight: f64 },

    #[error("weights sum to zero")]
    ZeroMass,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("empty sample")]
    EmptySample,

    #[error("absolute continuity violated: mass {mass} at atom {atom} has no dominating mass")]
    AbsoluteContinuityViolated { atom: f64, mass: f64 },

    #[error("instance of length {len} exceeds the enumeration limit {max}")]
    InstanceTooLarge { len: usize, max: usize },

    #[error("weight vectors differ")]
    WeightMismatch,

    #[error("invalid weighted sequence: {0}")]
    InvalidSequence(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
