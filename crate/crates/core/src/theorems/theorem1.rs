use serde::Serialize;

use super::{TheoremError, Verdict};
use crate::histories::{classify, Classification, ClassificationMode};
use crate::numerics::Tolerance;
use crate::trajectory::{NodeId, TrajectoryGraph};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairVerdict {
    pub from: NodeId,
    pub to: NodeId,
    pub paths: u64,
    /// `cos Δφ` between the two path amplitudes, when there are exactly two.
    pub cos_phase_gap: Option<f64>,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem1Report {
    pub classification: Classification,
    pub pairs: Vec<PairVerdict>,
    pub verdict: Verdict,
}

/// Path-count and phase-gap check over every pair whose source is connected.
///
/// Two paths must differ in phase by π/2; the test is `|cos Δφ| ≤ √eps`.
/// Medium-decohering families must have at most one path per pair.
pub fn check_theorem1(g: &TrajectoryGraph, tol: Tolerance) -> Result<Theorem1Report, TheoremError> {
    let classification = classify(g.family(), ClassificationMode::Weak, tol)?.classification;
    if classification == Classification::None {
        return Ok(Theorem1Report {
            classification,
            pairs: Vec::new(),
            verdict: Verdict::PreconditionNotMet("family does not decohere weakly".into()),
        });
    }
    let medium = classification == Classification::Medium;
    let cos_bound = tol.eps().sqrt();
    let labels = g.connectivity();
    let mut pairs = Vec::new();
    for source in g.nodes().filter(|n| labels.count(*n) > 0) {
        let counts = g.path_counts_from(source);
        for target in g.nodes().filter(|t| t.column > source.column) {
            let paths = counts[target.column][target.index];
            if paths == 0 {
                continue;
            }
            let mut cos_phase_gap = None;
            let mut ok = paths <= 2 && !(medium && paths > 1);
            if paths == 2 {
                let found = g.enumerate_paths(source, target);
                let (a1, a2) = (found[0].amplitude, found[1].amplitude);
                let cos = (a1 * a2.conj()).re / (a1.norm() * a2.norm());
                ok &= cos.abs() <= cos_bound;
                cos_phase_gap = Some(cos);
            }
            pairs.push(PairVerdict {
                from: source,
                to: target,
                paths,
                cos_phase_gap,
                ok,
            });
        }
    }
    let verdict = match pairs.iter().find(|p| !p.ok) {
        None => Verdict::Pass,
        Some(p) => Verdict::Violation(format!("{} → {} has {} paths", p.from, p.to, p.paths)),
    };
    Ok(Theorem1Report {
        classification,
        pairs,
        verdict,
    })
}
