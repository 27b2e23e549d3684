use thiserror::Error;

use crate::scalar::Backend;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong when building or transforming a phenomenon.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[non_exhaustive]
pub enum Error {
    #[error("value at index {index} is not a probability in [0, 1]")]
    NotAProbability { index: usize },
    #[error("all-success sequence must start with exactly 1")]
    NotUnitAtZero,
    #[error("sequence is not completely monotone: difference of order {j} at index {h} is negative")]
    NotCompletelyMonotone { h: usize, j: usize },
    #[error("needs moments up to order {needed} but only {available} are available")]
    DepthExceeded { needed: usize, available: usize },
    #[error("index {index} is out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("conditioning evidence has probability zero")]
    ImpossibleEvidence,
    #[error("weights must be nonnegative and sum to 1 (got sum {sum})")]
    WeightsNotNormalized { sum: String },
    #[error("atom {value} lies outside [0, 1]")]
    AtomOutOfRange { value: String },
    #[error("operation requires an atomic phenomenon")]
    NotAtomic,
    #[error("invalid urn geometry: {0}")]
    InvalidUrnGeometry(String),
    #[error("value does not belong to the {expected} backend")]
    MixedBackend { expected: Backend },
    #[error("invalid hypothesis model: {0}")]
    InvalidModel(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors raised by a well-formed request the calculus cannot
    /// answer, as opposed to malformed or invalid input.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::DepthExceeded { .. }
                | Error::IndexOutOfRange { .. }
                | Error::ImpossibleEvidence
                | Error::NotAtomic
        )
    }

    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotAProbability { .. } => "NotAProbability",
            Error::NotUnitAtZero => "NotUnitAtZero",
            Error::NotCompletelyMonotone { .. } => "NotCompletelyMonotone",
            Error::DepthExceeded { .. } => "DepthExceeded",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::ImpossibleEvidence => "ImpossibleEvidence",
            Error::WeightsNotNormalized { .. } => "WeightsNotNormalized",
            Error::AtomOutOfRange { .. } => "AtomOutOfRange",
            Error::NotAtomic => "NotAtomic",
            Error::InvalidUrnGeometry(_) => "InvalidUrnGeometry",
            Error::MixedBackend { .. } => "MixedBackend",
            Error::InvalidModel(_) => "InvalidModel",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Parse(_) => "Parse",
        }
    }
}
