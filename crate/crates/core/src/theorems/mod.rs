//! Executable checks of the structural constraints that decoherence places
//! on fine-grained histories, and a generator of families that saturate the
//! bound on noncongruent transitions.
//!
//! Checks distinguish a failed precondition (the input is not a decohering
//! fine-grained family, say) from a violation. A violation on verified input
//! is a counterexample and indicates a bug in this crate.

mod blocks;
mod insertion;
mod recurrence;
pub mod sampling;
pub mod search;
mod suite;
mod theorem1;
mod transitions;
mod two_level;
mod witness;

#[cfg(test)]
mod tests;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::histories::HistoryError;
use crate::numerics::NumericsError;
use crate::trajectory::GraphError;

pub use blocks::{extract_blocks, Block, BlockStructure};
pub use insertion::{insertion_admissible, InsertionReport};
pub use recurrence::{detect_recurrence, Recurrence};
pub use suite::{run_theorem_suite, TheoremCheck, TheoremSuiteReport, TWO_LEVEL_BAND};
pub use theorem1::{check_theorem1, PairVerdict, Theorem1Report};
pub use transitions::{classify_transition, classify_transitions, count_noncongruent, TransitionClass, TransitionKind};
pub use two_level::{two_level_condition, two_level_family, two_level_value, TwoLevelSpec};
pub use witness::{generate_maximal_family, max_noncongruent_bound, WitnessFamily};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TheoremError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    History(#[from] HistoryError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition not met: {0}")]
    Precondition(String),
    #[error("counterexample: {0}")]
    Counterexample(String),
    #[error("witness construction failed verification: {0}")]
    Construction(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "detail", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    PreconditionNotMet(String),
    Violation(String),
}

impl Verdict {
    pub fn is_violation(&self) -> bool {
        matches!(self, Verdict::Violation(_))
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => write!(f, "pass"),
            Verdict::PreconditionNotMet(why) => write!(f, "precondition not met ({why})"),
            Verdict::Violation(why) => write!(f, "VIOLATION ({why})"),
        }
    }
}
