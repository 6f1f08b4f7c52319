use serde::Serialize;

use super::transitions::classify_with;
use super::{TheoremError, TransitionClass, Verdict};
use crate::histories::{
    classify, is_congruent_pair, Classification, ClassificationMode, EventSet, HistoryError, HistoryFamily,
};
use crate::numerics::Tolerance;
use crate::trajectory::build_graph;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InsertionReport {
    /// Inserting the candidate keeps the family weakly decohering.
    pub admissible: bool,
    /// Full-set congruence with the neighbouring event sets.
    pub congruent_to_before: bool,
    pub congruent_to_after: bool,
    /// The connected events of the candidate (in the extended family) match
    /// those of a neighbour; this is the congruence the prediction uses.
    pub predicted: bool,
    /// `admissible == predicted`.
    pub agrees: bool,
    /// Connected or doubly connected counts at the later set differ between
    /// the extended and the original family.
    pub downstream_changed: bool,
    pub target_transition: TransitionClass,
    pub verdict: Verdict,
}

/// Inserts `candidate` between event sets `position - 1` and `position`
/// (0-based) and compares the recomputed decoherence with the prediction
/// that only a congruent extension survives a single-step transition.
///
/// The prediction can fail under weak decoherence: with `|0⟩`, z, x, an
/// inserted y basis keeps the family weakly decohering. Such an insertion
/// makes the later set's events doubly connected, so the transition it
/// splits no longer carries a single step. The verdict therefore flags a
/// violation only when an admissible noncongruent insertion leaves the
/// connectivity of the later set unchanged, or when a congruent one is not
/// admissible. `agrees` records the plain comparison.
pub fn insertion_admissible(
    family: &HistoryFamily,
    position: usize,
    candidate: &EventSet,
    tol: Tolerance,
) -> Result<InsertionReport, TheoremError> {
    let family = family.to_heisenberg()?;
    if candidate.dim() != family.dim() {
        return Err(HistoryError::DimensionMismatch {
            what: "candidate event set".into(),
            expected: family.dim(),
            found: candidate.dim(),
        }
        .into());
    }
    let sets = family.event_sets();
    if position == 0 || position >= sets.len() {
        return Err(TheoremError::Domain(format!(
            "insertion position {position} must lie strictly between two of the {} event sets",
            sets.len()
        )));
    }
    let g = build_graph(&family, tol)?;
    let target_transition = classify_with(&g, &g.connectivity(), position + 1, tol);

    let extended = family.with_inserted(position, candidate.clone(), tol)?;
    let admissible = classify(&extended, ClassificationMode::Weak, tol)?.classification != Classification::None;
    let congruent_to_before = is_congruent_pair(candidate, &sets[position - 1], tol)?;
    let congruent_to_after = is_congruent_pair(candidate, &sets[position], tol)?;

    let eg = build_graph(&extended, tol)?;
    let elabels = eg.connectivity();
    let inserted = position + 1;
    let predicted = classify_with(&eg, &elabels, inserted, tol).is_congruent()
        || classify_with(&eg, &elabels, inserted + 1, tol).is_congruent();
    let labels = g.connectivity();
    let later = position + 1;
    let downstream_changed = labels.connected_count(later) != elabels.connected_count(later + 1)
        || labels.doubly_count(later) != elabels.doubly_count(later + 1);

    let weak = classify(&family, ClassificationMode::Weak, tol)?.classification != Classification::None;
    let verdict = if !weak {
        Verdict::PreconditionNotMet("family does not decohere weakly".into())
    } else if !target_transition.is_single_step() {
        Verdict::PreconditionNotMet(format!(
            "transition into column {} is not a single step of change",
            target_transition.column
        ))
    } else if predicted && !admissible {
        Verdict::Violation("a congruent insertion broke decoherence".into())
    } else if admissible && !predicted && !downstream_changed {
        Verdict::Violation("noncongruent insertion kept decoherence and the later connectivity".into())
    } else {
        Verdict::Pass
    };
    Ok(InsertionReport {
        admissible,
        congruent_to_before,
        congruent_to_after,
        predicted,
        agrees: admissible == predicted,
        downstream_changed,
        target_transition,
        verdict,
    })
}
