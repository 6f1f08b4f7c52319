use serde::Serialize;

use super::search::{clifford_group, mix_pair};
use super::{
    check_theorem1, classify_transitions, count_noncongruent, detect_recurrence, extract_blocks, insertion_admissible,
    max_noncongruent_bound, two_level_condition, two_level_value, BlockStructure, Recurrence, TheoremError,
    TransitionClass, TransitionKind, TwoLevelSpec, Verdict,
};
use crate::histories::{classify, Classification, ClassificationMode, EventSet, HistoryFamily};
use crate::numerics::Tolerance;
use crate::spin::bloch_vector;
use crate::trajectory::{build_graph, TrajectoryGraph};

/// Disagreements with `|value|` at or below this are boundary cases.
pub const TWO_LEVEL_BAND: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremCheck {
    pub name: &'static str,
    #[serde(flatten)]
    pub verdict: Verdict,
    pub summary: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoLevelCheck {
    pub value: f64,
    pub condition: bool,
    pub weak: bool,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremSuiteReport {
    pub classification: Classification,
    pub checks: Vec<TheoremCheck>,
    pub transitions: Vec<TransitionClass>,
    pub recurrences: Vec<Recurrence>,
    pub blocks: Vec<BlockStructure>,
    pub noncongruent: Option<usize>,
    pub two_level: Option<TwoLevelCheck>,
}

impl TheoremSuiteReport {
    pub fn has_violation(&self) -> bool {
        self.checks.iter().any(|c| c.verdict.is_violation())
    }

    pub fn check(&self, name: &str) -> Option<&TheoremCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn check(name: &'static str, verdict: Verdict, summary: impl Into<String>) -> TheoremCheck {
    TheoremCheck {
        name,
        verdict,
        summary: summary.into(),
    }
}

const NAMES: [&str; 6] = [
    "path-count",
    "recurrence",
    "transition-kinds",
    "insertion",
    "transition-bound",
    "block-structure",
];

/// Runs every applicable check on `family`. Graph-based checks need a pure,
/// fine-grained family; otherwise they report an unmet precondition.
pub fn run_theorem_suite(family: &HistoryFamily, tol: Tolerance) -> Result<TheoremSuiteReport, TheoremError> {
    let family = family.to_heisenberg()?;
    let classification = classify(&family, ClassificationMode::Weak, tol)?.classification;
    let mut report = TheoremSuiteReport {
        classification,
        checks: Vec::new(),
        transitions: Vec::new(),
        recurrences: Vec::new(),
        blocks: Vec::new(),
        noncongruent: None,
        two_level: None,
    };
    let g = match build_graph(&family, tol) {
        Ok(g) => g,
        Err(e) => {
            for name in NAMES {
                report.checks.push(check(
                    name,
                    Verdict::PreconditionNotMet(e.to_string()),
                    "no trajectory graph",
                ));
            }
            return Ok(report);
        }
    };
    let weak = classification != Classification::None;
    let not_weak = || Verdict::PreconditionNotMet("family does not decohere weakly".into());

    let t1 = check_theorem1(&g, tol)?;
    let two_path = t1.pairs.iter().filter(|p| p.paths == 2).count();
    report.checks.push(check(
        NAMES[0],
        t1.verdict,
        format!(
            "{} pairs from connected sources, {two_path} with two paths",
            t1.pairs.len()
        ),
    ));

    report.recurrences = detect_recurrence(&g, tol);
    let n_rec = report.recurrences.len();
    let verdict = match (n_rec, weak) {
        (0, _) => Verdict::Pass,
        (_, true) => Verdict::Violation(format!("{n_rec} recurrences in a weakly decohering family")),
        (_, false) => Verdict::PreconditionNotMet("family does not decohere weakly".into()),
    };
    report
        .checks
        .push(check(NAMES[1], verdict, format!("{n_rec} recurrence obstructions")));

    report.transitions = classify_transitions(&g, tol);
    let anomalous: Vec<usize> = report
        .transitions
        .iter()
        .filter(|t| t.kind == TransitionKind::Anomalous)
        .map(|t| t.column)
        .collect();
    let verdict = if !weak {
        not_weak()
    } else if anomalous.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Violation(format!("transitions into columns {anomalous:?} match no allowed case"))
    };
    let kinds: Vec<String> = report.transitions.iter().map(|t| format!("{:?}", t.kind)).collect();
    report.checks.push(check(NAMES[2], verdict, kinds.join(", ")));

    report
        .checks
        .push(insertion_check(&family, &report.transitions, weak, tol)?);

    let last = g.column_count() - 1;
    report.noncongruent = Some(count_noncongruent(&report.transitions, last));
    report.checks.push(bound_check(&g, &report.transitions, weak));

    let mut worst_off = 0.0f64;
    let mut verdict = if weak { Verdict::Pass } else { not_weak() };
    if weak {
        let labels = g.connectivity();
        for col in 1..g.column_count() {
            if labels.connected_count(col) != labels.connected_count(col - 1) {
                continue;
            }
            match extract_blocks(&g, col, tol) {
                Ok(b) => {
                    worst_off = worst_off.max(b.off_block_max);
                    report.blocks.push(b);
                }
                Err(TheoremError::Counterexample(why)) => {
                    verdict = Verdict::Violation(why);
                    break;
                }
                Err(e) => return Err(e),
            }
        }
    }
    let sizes: Vec<String> = report
        .blocks
        .iter()
        .map(|b| {
            let s: Vec<String> = b.blocks.iter().map(|x| format!("{0}×{0}", x.size())).collect();
            format!("column {}: {}", b.column, s.join(" "))
        })
        .collect();
    let summary = if sizes.is_empty() {
        "no count-preserving transitions".to_string()
    } else {
        format!("{}; off-block max {worst_off:.1e}", sizes.join("; "))
    };
    report.checks.push(check(NAMES[5], verdict, summary));

    if family.dim() == 2 && family.event_sets().len() == 2 {
        report.two_level = two_level_check(&family, weak, tol);
        if let Some(tl) = &report.two_level {
            let verdict = if tl.agree || tl.value.abs() <= TWO_LEVEL_BAND {
                Verdict::Pass
            } else {
                Verdict::Violation(format!("geometric condition {} but weak = {}", tl.condition, tl.weak))
            };
            report
                .checks
                .push(check("two-level", verdict, format!("(i×n)·(n×f) = {:.6}", tl.value)));
        }
    }
    Ok(report)
}

fn two_level_check(family: &HistoryFamily, weak: bool, tol: Tolerance) -> Option<TwoLevelCheck> {
    let psi = family.initial().as_pure()?;
    let n = family.event_sets()[0].vectors()?[0].clone();
    let f = family.event_sets()[1].vectors()?[0].clone();
    let spec = TwoLevelSpec::new(
        bloch_vector(psi),
        bloch_vector(&n),
        bloch_vector(&f),
        Tolerance::new(1e-6).ok()?,
    )
    .ok()?;
    let condition = two_level_condition(&spec, tol);
    Some(TwoLevelCheck {
        value: two_level_value(&spec),
        condition,
        weak,
        agree: condition == weak,
    })
}

fn bound_check(g: &TrajectoryGraph, transitions: &[TransitionClass], weak: bool) -> TheoremCheck {
    if !weak {
        return check(
            NAMES[4],
            Verdict::PreconditionNotMet("family does not decohere weakly".into()),
            "",
        );
    }
    let labels = g.connectivity();
    for col in 1..g.column_count() {
        let n = labels.connected_count(col);
        let count = count_noncongruent(transitions, col);
        let bound = max_noncongruent_bound(n).unwrap_or(0);
        if count > bound {
            return check(
                NAMES[4],
                Verdict::Violation(format!(
                    "{count} noncongruent transitions by column {col} with {n} connected"
                )),
                "",
            );
        }
    }
    let last = g.column_count() - 1;
    let n = labels.connected_count(last);
    let count = count_noncongruent(transitions, last);
    let summary = match max_noncongruent_bound(n) {
        Ok(b) => format!("{count} noncongruent transitions, bound {b} for {n} connected events"),
        Err(_) => format!("{count} noncongruent transitions, {n} connected event"),
    };
    check(NAMES[4], Verdict::Pass, summary)
}

/// Candidate sets for each single-step transition: both neighbours and
/// Clifford mixes of the earlier one on its leading pairs.
fn insertion_check(
    family: &HistoryFamily,
    transitions: &[TransitionClass],
    weak: bool,
    tol: Tolerance,
) -> Result<TheoremCheck, TheoremError> {
    if !weak {
        return Ok(check(
            NAMES[3],
            Verdict::PreconditionNotMet("family does not decohere weakly".into()),
            "",
        ));
    }
    let sets = family.event_sets();
    let group = clifford_group();
    let mut tried = 0usize;
    let mut admissible = 0usize;
    let mut disagreements = 0usize;
    for t in transitions.iter().filter(|t| t.column >= 2 && t.is_single_step()) {
        let position = t.column - 1;
        let before = sets[position - 1].vectors().expect("graph families are fine-grained");
        let lead = before.len().min(3);
        let mut candidates = vec![sets[position - 1].clone(), sets[position].clone()];
        for i in 0..lead {
            for j in i + 1..lead {
                for u in &group {
                    candidates.push(EventSet::from_basis(1, mix_pair(before, i, j, u), tol)?);
                }
            }
        }
        for cand in candidates {
            let r = insertion_admissible(family, position, &cand, tol)?;
            tried += 1;
            admissible += usize::from(r.admissible);
            disagreements += usize::from(!r.agrees);
            if r.verdict.is_violation() {
                return Ok(check(
                    NAMES[3],
                    r.verdict,
                    format!("insertion before set {}", position + 1),
                ));
            }
        }
    }
    if tried == 0 {
        return Ok(check(
            NAMES[3],
            Verdict::PreconditionNotMet("no single-step transition between event sets".into()),
            "",
        ));
    }
    Ok(check(
        NAMES[3],
        Verdict::Pass,
        format!(
            "{tried} insertions tried, {admissible} admissible, {disagreements} admissible without congruence \
             (each changes the later connectivity)"
        ),
    ))
}
