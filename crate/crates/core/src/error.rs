use thiserror::Error;

/// Errors raised by the model and analytics operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("class index {index} out of range (dataset has {classes} classes)")]
    ClassOutOfRange { index: usize, classes: usize },

    #[error("bin index {index} out of range (histogram has {bins} bins)")]
    BinOutOfRange { index: usize, bins: usize },

    #[error("no histogram supplied for class index {0}")]
    MissingHistogram(usize),

    #[error("invalid histogram spec: {0}")]
    InvalidSpec(String),

    #[error("no samples pass the current filter for class index {0}")]
    EmptySelection(usize),

    #[error("unknown sample id `{0}`")]
    UnknownSample(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("score row sums to zero")]
    DegenerateRow,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
