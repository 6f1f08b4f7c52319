use serde::{Deserialize, Serialize};

use super::family::{EventSet, HistoryFamily, HistoryIndex, HISTORY_CAP};
use super::HistoryError;
use crate::numerics::{mat_mul, trace_with_adjoint, CMatrix, CNum, CVector, Tolerance};

/// Decoherence functional over the enumerated histories of a family.
///
/// Families with at most [`FULL_ENUMERATION_LIMIT`] histories are enumerated
/// in full. Larger families are enumerated depth-first with every prefix of
/// probability ≤ eps² discarded; by Cauchy–Schwarz each discarded history has
/// `|D(α, β)| ≤ eps` against every other history, so none of them can carry
/// a violation. `pruned` counts the discarded histories, and at most
/// [`HISTORY_CAP`] may remain.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceFunctional {
    pub histories: Vec<HistoryIndex>,
    pub d_matrix: CMatrix,
    pub probabilities: Vec<f64>,
    pub pruned: usize,
}

impl DecoherenceFunctional {
    pub fn get(&self, a: usize, b: usize) -> CNum {
        self.d_matrix[(a, b)]
    }

    pub fn position(&self, idx: &HistoryIndex) -> Option<usize> {
        self.histories.iter().position(|h| h == idx)
    }

    /// `D(α, β)` looked up by history index; pruned histories read as 0.
    pub fn value(&self, a: &HistoryIndex, b: &HistoryIndex) -> CNum {
        match (self.position(a), self.position(b)) {
            (Some(i), Some(j)) => self.d_matrix[(i, j)],
            _ => CNum::new(0.0, 0.0),
        }
    }

    pub fn total_probability(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// Largest `|D(α, β) − conj(D(β, α))|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.histories.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.d_matrix[(i, j)] - self.d_matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ClassificationMode {
    Weak,
    Medium,
}

/// Strongest decoherence level satisfied; ordered `None < Weak < Medium`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    None,
    Weak,
    Medium,
}

impl Classification {
    pub fn satisfies(self, mode: ClassificationMode) -> bool {
        match mode {
            ClassificationMode::Weak => self >= Classification::Weak,
            ClassificationMode::Medium => self == Classification::Medium,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Classification::None => "none",
            Classification::Weak => "weak",
            Classification::Medium => "medium",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub alpha: HistoryIndex,
    pub beta: HistoryIndex,
    pub value: CNum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceReport {
    pub functional: DecoherenceFunctional,
    pub mode: ClassificationMode,
    pub classification: Classification,
    /// Off-diagonal pairs (α < β) failing the requested mode.
    pub violations: Vec<Violation>,
}

impl DecoherenceReport {
    pub fn satisfied(&self) -> bool {
        self.classification.satisfies(self.mode)
    }
}

/// Families with at most this many histories list every history, including
/// those of zero probability; larger ones list only the support.
pub const FULL_ENUMERATION_LIMIT: usize = 2048;

/// `C_α ψ` for a pure state, or `(C_α ρ, C_α)` for a density matrix.
enum Kernel {
    Pure(Vec<CVector>),
    Mixed(Vec<CMatrix>, Vec<CMatrix>),
}

enum Partial {
    Pure(CVector),
    Mixed(CMatrix),
}

struct Enumerated {
    histories: Vec<HistoryIndex>,
    kernel: Kernel,
    pruned: usize,
}

impl Enumerated {
    fn push(&mut self, idx: HistoryIndex, chain: Partial, rho: &CMatrix) -> Result<(), HistoryError> {
        self.histories.push(idx);
        match (&mut self.kernel, chain) {
            (Kernel::Pure(ws), Partial::Pure(w)) => ws.push(w),
            (Kernel::Mixed(weighted, chains), Partial::Mixed(c)) => {
                weighted.push(mat_mul(&c, rho)?);
                chains.push(c);
            }
            _ => unreachable!("kernel kind fixed by the initial state"),
        }
        Ok(())
    }
}

/// Depth-first over event choices. With `prune`, prefixes of probability
/// ≤ eps² are dropped.
fn enumerate(family: &HistoryFamily, rho: &CMatrix, prune: bool, tol: Tolerance) -> Result<Enumerated, HistoryError> {
    let threshold = if prune { tol.eps() * tol.eps() } else { -1.0 };
    let sets = family.event_sets();
    let psi = family.initial().as_pure();
    let mut out = Enumerated {
        histories: Vec::new(),
        kernel: match psi {
            Some(_) => Kernel::Pure(Vec::new()),
            None => Kernel::Mixed(Vec::new(), Vec::new()),
        },
        pruned: 0,
    };
    // Number of completions below each depth, for the pruned count.
    let mut tail = vec![1usize; sets.len() + 1];
    for k in (0..sets.len()).rev() {
        tail[k] = tail[k + 1].saturating_mul(sets[k].len());
    }
    let root = match psi {
        Some(v) => Partial::Pure(v.clone()),
        None => Partial::Mixed(CMatrix::identity(family.dim())),
    };
    let mut stack: Vec<(Vec<usize>, Partial)> = vec![(Vec::new(), root)];
    while let Some((prefix, chain)) = stack.pop() {
        let depth = prefix.len();
        if depth == sets.len() {
            if out.histories.len() >= HISTORY_CAP {
                return Err(HistoryError::TooManyHistories {
                    count: out.histories.len() + 1,
                    cap: HISTORY_CAP,
                });
            }
            out.push(HistoryIndex(prefix), chain, rho)?;
            continue;
        }
        // Reverse push keeps the depth-first output lexicographic.
        for a in (0..sets[depth].len()).rev() {
            let projector = &sets[depth].projectors()[a];
            let (next, p) = match &chain {
                Partial::Pure(w) => {
                    let v = projector.apply(w)?;
                    let p = v.norm_sqr();
                    (Partial::Pure(v), p)
                }
                Partial::Mixed(c) => {
                    let next = mat_mul(projector, c)?;
                    let p = trace_with_adjoint(&mat_mul(&next, rho)?, &next)?.re;
                    (Partial::Mixed(next), p)
                }
            };
            if p <= threshold {
                out.pruned = out.pruned.saturating_add(tail[depth + 1]);
                continue;
            }
            let mut extended = prefix.clone();
            extended.push(a);
            stack.push((extended, next));
        }
    }
    Ok(out)
}

/// `D(α, β) = Tr(C_α ρ C_β†)` for every pair of enumerated histories; for a
/// pure state this is `⟨C_β ψ | C_α ψ⟩`.
pub fn decoherence_functional(family: &HistoryFamily, tol: Tolerance) -> Result<DecoherenceFunctional, HistoryError> {
    let family = family.to_heisenberg()?;
    let rho = family.initial().density();
    let prune = family.history_count() > FULL_ENUMERATION_LIMIT;
    let enumerated = enumerate(&family, &rho, prune, tol)?;
    let n = enumerated.histories.len();
    let mut d = CMatrix::zeros(n, n);
    match &enumerated.kernel {
        Kernel::Pure(ws) => {
            for (i, a) in ws.iter().enumerate() {
                for (j, b) in ws.iter().enumerate() {
                    d[(i, j)] = b.inner(a);
                }
            }
        }
        Kernel::Mixed(weighted, chains) => {
            for (i, a) in weighted.iter().enumerate() {
                for (j, b) in chains.iter().enumerate() {
                    d[(i, j)] = trace_with_adjoint(a, b)?;
                }
            }
        }
    }
    let probabilities = (0..n).map(|i| d[(i, i)].re.clamp(0.0, 1.0)).collect();
    Ok(DecoherenceFunctional {
        histories: enumerated.histories,
        d_matrix: d,
        probabilities,
        pruned: enumerated.pruned,
    })
}

/// Weak: `|Re D(α,β)| ≤ eps`; medium: `|D(α,β)| ≤ eps`, for all `α ≠ β`.
pub fn classify(
    family: &HistoryFamily,
    mode: ClassificationMode,
    tol: Tolerance,
) -> Result<DecoherenceReport, HistoryError> {
    let functional = decoherence_functional(family, tol)?;
    Ok(classify_functional(functional, mode, tol))
}

pub fn classify_functional(
    functional: DecoherenceFunctional,
    mode: ClassificationMode,
    tol: Tolerance,
) -> DecoherenceReport {
    let eps = tol.eps();
    let n = functional.histories.len();
    let mut weak_ok = true;
    let mut medium_ok = true;
    let mut violations = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let value = functional.d_matrix[(i, j)];
            let weak_bad = value.re.abs() > eps;
            let medium_bad = value.norm() > eps;
            weak_ok &= !weak_bad;
            medium_ok &= !medium_bad;
            let failing = match mode {
                ClassificationMode::Weak => weak_bad,
                ClassificationMode::Medium => medium_bad,
            };
            if failing {
                violations.push(Violation {
                    alpha: functional.histories[i].clone(),
                    beta: functional.histories[j].clone(),
                    value,
                });
            }
        }
    }
    let classification = if medium_ok {
        Classification::Medium
    } else if weak_ok {
        Classification::Weak
    } else {
        Classification::None
    };
    DecoherenceReport {
        functional,
        mode,
        classification,
        violations,
    }
}

/// Two fine-grained sets are congruent when their overlap matrix is a
/// permutation matrix with unit-modulus entries, i.e. the events agree up to
/// relabeling and phase.
pub fn is_congruent_pair(e1: &EventSet, e2: &EventSet, tol: Tolerance) -> Result<bool, HistoryError> {
    let (Some(v1), Some(v2)) = (e1.vectors(), e2.vectors()) else {
        return Err(HistoryError::UnsupportedGranularity);
    };
    if e1.dim() != e2.dim() {
        return Err(HistoryError::DimensionMismatch {
            what: "congruence check".into(),
            expected: e1.dim(),
            found: e2.dim(),
        });
    }
    if v1.len() != v2.len() {
        return Ok(false);
    }
    let eps = tol.eps();
    let mut matched = vec![false; v1.len()];
    for b in v2 {
        let mut unit_hits = 0;
        for (a, va) in v1.iter().enumerate() {
            let m = b.inner(va).norm();
            if (m - 1.0).abs() <= eps {
                if matched[a] {
                    return Ok(false);
                }
                matched[a] = true;
                unit_hits += 1;
            } else if m > eps {
                return Ok(false);
            }
        }
        if unit_hits != 1 {
            return Ok(false);
        }
    }
    Ok(true)
}
