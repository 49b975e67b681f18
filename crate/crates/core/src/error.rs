use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("variable count mismatch: {left} vs {right}")]
    VariableMismatch { left: usize, right: usize },

    #[error("exponent {value} exceeds the configured cap {cap}")]
    ExponentCap { value: u64, cap: u32 },

    #[error("operation `{0}` is undefined on the unit ideal")]
    UnitIdeal(&'static str),

    #[error("quotient has positive Krull dimension {0}; expected an Artinian quotient")]
    PositiveDimension(usize),

    #[error("truncation too low: module known through degree {have}, need {need}")]
    TruncationTooLow { have: usize, need: usize },

    #[error("resource ceiling exceeded: {0}")]
    ResourceCeiling(String),

    #[error("filtration invalid at index {index}: {reason}")]
    InvalidFiltration { index: usize, reason: String },

    #[error("Hilbert-Samuel function has not stabilized within n <= {n_max}")]
    StabilizationNotReached { n_max: usize },

    #[error("no certified filter-regular linear form at stage {stage} after seeds {seeds:?}")]
    CertificationFailed { stage: usize, seeds: Vec<u64> },

    #[error("unsupported case: {0}")]
    Unsupported(String),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
}

impl Error {
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            Error::ResourceCeiling(_) | Error::StabilizationNotReached { .. } | Error::Overflow(_)
        )
    }
}
