use thiserror::Error;

/// Errors surfaced by the library. Contract violations (dimension mismatches,
/// empty inputs) are reported rather than panicking so that callers such as
/// the experiment harness can fail cleanly.
#[derive(Debug, Error)]
pub enum FeefError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("empty batch")]
    EmptyBatch,

    #[error("non-finite loss at sample {sample}")]
    NonFiniteLoss { sample: usize },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("ensemble member index {index} out of range (ensemble size {size})")]
    MemberOutOfRange { index: usize, size: usize },

    #[error("information gain needs at least 2 ensemble members, got {0}")]
    EnsembleTooSmall(usize),

    #[error("empty replay buffer")]
    EmptyBuffer,

    #[error("refit needs {needed} finite-scored candidates, got {got}")]
    TooFewFiniteScores { needed: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown environment '{0}'")]
    UnknownEnv(String),

    #[error("invalid probability table: {0}")]
    InvalidTable(String),

    #[error("malformed checkpoint: {0}")]
    MalformedCheckpoint(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, FeefError>;
