use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid episode: {0}")]
    InvalidEpisode(String),

    #[error("invalid selection: {0}")]
    InvalidSelection(String),

    #[error("episode is unlabeled: {0}")]
    Unlabeled(&'static str),

    #[error("non-canonical pair order: bag {bag_i} must be greater than bag {bag_j}")]
    NonCanonicalPair { bag_i: usize, bag_j: usize },

    #[error("beam ranges are not adjacent: left covers {left_start}..{left_end}, right starts at {right_start}")]
    NonAdjacentBeams {
        left_start: usize,
        left_end: usize,
        right_start: usize,
    },

    #[error("exhaustive search space of {size} selections exceeds the cap of {cap}; use greedy or loopy-bp")]
    SearchSpaceTooLarge { size: u128, cap: u128 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("training diverged at step {step}: loss = {loss}")]
    Diverged { step: usize, loss: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
