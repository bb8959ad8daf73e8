use thiserror::Error;

/// Errors shared across the crate. `code` gives the stable machine-readable
/// name used by the CLI's JSON error output.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("m must be an integer >= 2, got {0}")]
    InvalidM(u32),

    #[error("lambda must satisfy 0 < lambda < 1/m, got {lambda} with m = {m}")]
    InvalidRatio { m: u32, lambda: String },

    #[error("certified mode requires 1/(m+1) <= lambda < 1/m, got {lambda} with m = {m}")]
    OutOfCertifiedRange { m: u32, lambda: String },

    #[error("digit {digit} out of range for m = {m}")]
    DigitOutOfRange { m: u32, digit: u8 },

    #[error("{0}")]
    DomainError(String),

    #[error("word {0:?} is not in the admissible family (first digit must be nonzero)")]
    NotInFamilyA(String),

    #[error("scale factor must be positive, got {0}")]
    NonpositiveFactor(String),

    #[error("input must be sorted strictly increasing by lambda")]
    UnsortedInput,

    #[error("computation exceeds configured budget: {0}")]
    ResourceBudgetExceeded(String),

    #[error("grid point {lambda} outside [1/(m+1), 1/m) for m = {m}")]
    GridOutOfRange { m: u32, lambda: String },

    #[error("alpha must satisfy 0 < alpha and lambda <= 1/m - alpha, got alpha = {0}")]
    AlphaOutOfRange(String),

    #[error("the closed-form coverage target requires m = 2 and 11/25 < lambda < 1/2, got m = {m}, lambda = {lambda}")]
    CoverageRangeError { m: u32, lambda: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidM(_) => "InvalidM",
            Error::InvalidRatio { .. } => "InvalidRatio",
            Error::OutOfCertifiedRange { .. } => "OutOfCertifiedRange",
            Error::DigitOutOfRange { .. } => "DigitOutOfRange",
            Error::DomainError(_) => "DomainError",
            Error::NotInFamilyA(_) => "NotInFamilyA",
            Error::NonpositiveFactor(_) => "NonpositiveFactor",
            Error::UnsortedInput => "UnsortedInput",
            Error::ResourceBudgetExceeded(_) => "ResourceBudgetExceeded",
            Error::GridOutOfRange { .. } => "GridOutOfRange",
            Error::AlphaOutOfRange(_) => "AlphaOutOfRange",
            Error::CoverageRangeError { .. } => "CoverageRangeError",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
