//! History families, chain operators and the decoherence functional.
//!
//! A family is an initial state followed by time-ordered complete event
//! sets. Histories are all choices of one event per set; the chain operator
//! of a history is the time-ordered product of its projectors, and the
//! decoherence functional is `D(α, β) = Tr(C_α ρ C_β†)`.

mod family;
mod functional;

use thiserror::Error;

use crate::numerics::NumericsError;

pub use family::{EventSet, Granularity, HistoryFamily, HistoryIndex, InitialState, Picture, HISTORY_CAP};
pub use functional::{
    classify, classify_functional, decoherence_functional, is_congruent_pair, Classification, ClassificationMode,
    DecoherenceFunctional, DecoherenceReport, Violation, FULL_ENUMERATION_LIMIT,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HistoryError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("invalid initial state: {0}")]
    InvalidState(String),
    #[error("resolution of identity violated at set {set}")]
    ResolutionOfIdentity { set: usize },
    #[error("projectors {a} and {b} are not orthogonal at set {set}")]
    NotOrthogonal { set: usize, a: usize, b: usize },
    #[error("entry {index} of set {set} is not a Hermitian idempotent")]
    NotProjector { set: usize, index: usize },
    #[error("basis of set {set} is not orthonormal")]
    NotOrthonormal { set: usize },
    #[error("non-finite entries in set {set}")]
    NonFinite { set: usize },
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        found: usize,
    },
    #[error("event times must increase strictly (set {earlier} followed by set {later})")]
    TimeOrder { earlier: usize, later: usize },
    #[error("interval unitary {interval} is not unitary")]
    NotUnitary { interval: usize },
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("{count} histories exceed the cap of {cap}")]
    TooManyHistories { count: usize, cap: usize },
    #[error("operation requires a heisenberg-picture family")]
    Picture,
    #[error("operation requires fine-grained event sets")]
    UnsupportedGranularity,
}

#[cfg(test)]
mod tests;
