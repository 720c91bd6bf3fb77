use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input: at least one sample is required")]
    EmptyInput,
    #[error("non-finite value {value} at position {index}")]
    NonFiniteValue { index: usize, value: f64 },
    #[error("value {value} outside the domain {domain}")]
    DomainError { value: f64, domain: &'static str },
    #[error("at least two distributions are required, got {0}")]
    NeedAtLeastTwo(usize),
    #[error("all distributions must share one sample count (got {0} and {1})")]
    UnequalSampleSizes(usize, usize),
    #[error("invalid test configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown risk measure `{0}`")]
    UnknownRisk(String),
    #[error("tail level p={0} was not part of the summary grid")]
    TailLevelNotInGrid(f64),
    #[error("expected {expected} weights, got {got}")]
    WeightMismatch { expected: usize, got: usize },
    #[error("weights must be non-negative and sum to one")]
    InvalidWeights,
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("exhaustive search over {0} items is too large (limit 9)")]
    TooLarge(usize),
    #[error("index {index} out of range for {len} distributions")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("paired resampling requires distributions built from raw samples")]
    MissingSampleOrder,
}

pub type Result<T> = std::result::Result<T, Error>;
