//! Search for a further noncongruent transition that keeps a family weakly
//! decohering. Candidates apply a single-qubit Clifford (24 elements modulo
//! phase) to one pair of vectors of the final event set.

use rand::Rng;
use serde::Serialize;

use super::transitions::classify_with;
use super::TheoremError;
use crate::histories::{classify, Classification, ClassificationMode, EventSet, HistoryFamily};
use crate::numerics::{c, CMatrix, CVector, Tolerance};
use crate::random::random_unitary;
use crate::trajectory::build_graph;

fn canonical_phase(m: &CMatrix) -> CMatrix {
    let pivot = (0..m.rows() * m.cols())
        .map(|k| m[(k / m.cols(), k % m.cols())])
        .find(|z| z.norm() > 1e-6)
        .expect("unitary matrices are nonzero");
    m.scale(pivot.conj() / pivot.norm())
}

/// The single-qubit Clifford group modulo global phase, generated by H and S.
pub fn clifford_group() -> Vec<CMatrix> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let gens = [
        CMatrix::from_rows(vec![vec![c(h, 0.0), c(h, 0.0)], vec![c(h, 0.0), c(-h, 0.0)]]).expect("2×2"),
        CMatrix::from_rows(vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 1.0)]]).expect("2×2"),
    ];
    let mut group = vec![CMatrix::identity(2)];
    let mut frontier = group.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for g in &frontier {
            for s in &gens {
                let p = canonical_phase(&(g * s));
                if !group.iter().any(|q| q.approx_eq(&p, Tolerance::default())) {
                    group.push(p.clone());
                    next.push(p);
                }
            }
        }
        frontier = next;
    }
    group
}

/// New basis with `[v_i, v_j]` replaced by `[v_i, v_j] · u`.
pub fn mix_pair(basis: &[CVector], i: usize, j: usize, u: &CMatrix) -> Vec<CVector> {
    let mut out = basis.to_vec();
    out[i] = &basis[i].scale(u[(0, 0)]) + &basis[j].scale(u[(1, 0)]);
    out[j] = &basis[i].scale(u[(0, 1)]) + &basis[j].scale(u[(1, 1)]);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtensionSearch {
    pub candidates: usize,
    /// Candidates whose appended set is a noncongruent transition yet keeps
    /// the family weakly decohering, described as `(i, j, element index)`.
    pub admissible_noncongruent: Vec<(usize, usize, usize)>,
}

fn appended_is_admissible(family: &HistoryFamily, basis: Vec<CVector>, tol: Tolerance) -> Result<bool, TheoremError> {
    let label = family.event_sets().last().map_or(1, |s| s.time_label() + 1);
    let mut sets = family.event_sets().to_vec();
    sets.push(EventSet::from_basis(label, basis, tol)?);
    let extended = HistoryFamily::heisenberg(family.initial().clone(), sets, tol)?;
    if classify(&extended, ClassificationMode::Weak, tol)?.classification == Classification::None {
        return Ok(false);
    }
    let g = build_graph(&extended, tol)?;
    let last = g.column_count() - 1;
    Ok(!classify_with(&g, &g.connectivity(), last, tol).is_congruent())
}

fn final_basis(family: &HistoryFamily) -> Result<Vec<CVector>, TheoremError> {
    family
        .event_sets()
        .last()
        .and_then(|s| s.vectors())
        .map(|v| v.to_vec())
        .ok_or_else(|| TheoremError::Precondition("family needs a final fine-grained event set".into()))
}

/// Every Clifford on every pair of final vectors, appended as one more set.
pub fn exhaustive_extension_search(family: &HistoryFamily, tol: Tolerance) -> Result<ExtensionSearch, TheoremError> {
    let basis = final_basis(family)?;
    let group = clifford_group();
    let mut report = ExtensionSearch {
        candidates: 0,
        admissible_noncongruent: Vec::new(),
    };
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            for (k, u) in group.iter().enumerate() {
                report.candidates += 1;
                if appended_is_admissible(family, mix_pair(&basis, i, j, u), tol)? {
                    report.admissible_noncongruent.push((i, j, k));
                }
            }
        }
    }
    Ok(report)
}

/// Random candidates: a Clifford or Haar-random 2×2 on a random pair, or a
/// Haar-random change of the whole final basis.
pub fn sampled_extension_search<R: Rng + ?Sized>(
    family: &HistoryFamily,
    rng: &mut R,
    samples: usize,
    tol: Tolerance,
) -> Result<ExtensionSearch, TheoremError> {
    let basis = final_basis(family)?;
    let d = basis.len();
    let group = clifford_group();
    let mut report = ExtensionSearch {
        candidates: 0,
        admissible_noncongruent: Vec::new(),
    };
    for s in 0..samples {
        let i = rng.random_range(0..d);
        let j = (i + rng.random_range(1..d)) % d;
        let candidate = match s % 3 {
            0 => mix_pair(&basis, i, j, &group[rng.random_range(0..group.len())]),
            1 => mix_pair(&basis, i, j, &random_unitary(rng, 2)),
            _ => {
                let w = random_unitary(rng, d);
                let frame = CMatrix::from_columns(&basis).expect("square basis");
                (0..d).map(|k| frame.apply(&w.column(k)).expect("square")).collect()
            }
        };
        report.candidates += 1;
        if appended_is_admissible(family, candidate, tol)? {
            report.admissible_noncongruent.push((i, j, usize::MAX));
        }
    }
    Ok(report)
}
