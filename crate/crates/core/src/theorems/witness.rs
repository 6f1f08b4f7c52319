use serde::Serialize;

use super::transitions::{classify_transitions, count_noncongruent};
use super::{TheoremError, TransitionClass};
use crate::histories::{classify, Classification, ClassificationMode, EventSet, HistoryFamily, InitialState};
use crate::numerics::{c, CNum, CVector, Tolerance};
use crate::random::{random_unitary, seeded};
use crate::trajectory::build_graph;

pub const MAX_WITNESS_DIM: usize = 8;

/// `n + ⌊n/2⌋ − 2`.
pub fn max_noncongruent_bound(n: usize) -> Result<usize, TheoremError> {
    if n < 2 {
        return Err(TheoremError::Domain(format!("bound needs n ≥ 2, got {n}")));
    }
    Ok(n + n / 2 - 2)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessFamily {
    #[serde(skip)]
    pub family: HistoryFamily,
    pub n: usize,
    pub transitions: Vec<TransitionClass>,
    pub noncongruent: usize,
}

impl WitnessFamily {
    /// The same witness with every vector rotated by a seeded random unitary.
    /// Seed 0 returns the canonical frame.
    pub fn in_random_frame(&self, seed: u64, tol: Tolerance) -> Result<WitnessFamily, TheoremError> {
        if seed == 0 {
            return Ok(self.clone());
        }
        let w = random_unitary(&mut seeded(seed), self.family.dim());
        let psi = self.family.initial().as_pure().expect("witness states are pure");
        let sets = self
            .family
            .event_sets()
            .iter()
            .map(|s| {
                let basis = s
                    .vectors()
                    .expect("fine-grained")
                    .iter()
                    .map(|v| w.apply(v))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok::<_, TheoremError>(EventSet::from_basis(s.time_label(), basis, tol)?)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let family = HistoryFamily::heisenberg(InitialState::pure(w.apply(psi)?, tol)?, sets, tol)?;
        verify(family, self.n, tol)
    }
}

/// `[a', b'] = [[u00, u01], [u10, u11]] · [a, b]`.
fn rotate_pair(column: &mut [CVector], a: usize, b: usize, u: [[CNum; 2]; 2]) {
    let (va, vb) = (column[a].clone(), column[b].clone());
    column[a] = &va.scale(u[0][0]) + &vb.scale(u[0][1]);
    column[b] = &va.scale(u[1][0]) + &vb.scale(u[1][1]);
}

/// A weakly decohering family in dimension `n` whose transitions after the
/// first are all noncongruent, `n − 2` of them branch steps and `⌊n/2⌋`
/// interference steps. Verified before return.
pub fn generate_maximal_family(n: usize) -> Result<WitnessFamily, TheoremError> {
    if !(2..=MAX_WITNESS_DIM).contains(&n) {
        return Err(TheoremError::Domain(format!(
            "witness dimension must lie in 2..={MAX_WITNESS_DIM}, got {n}"
        )));
    }
    let tol = Tolerance::default();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let hadamard = [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]];
    let mut column: Vec<CVector> = (0..n).map(|k| CVector::basis(n, k)).collect();
    rotate_pair(&mut column, 0, 1, hadamard);
    let mut columns = vec![column.clone()];

    // each branch splits a singly connected node with a fresh unconnected one
    for step in 0..n - 2 {
        rotate_pair(&mut column, step, step + 2, hadamard);
        columns.push(column.clone());
    }
    // amplitudes are real at this point, so a ±π/4 split puts the two
    // paths into each new node π/2 apart
    let (p, m) = (c(0.5, 0.5), c(0.5, -0.5));
    for pair in 0..n / 2 {
        rotate_pair(&mut column, 2 * pair, 2 * pair + 1, [[p, m], [m, p]]);
        columns.push(column.clone());
    }

    let sets = columns
        .into_iter()
        .enumerate()
        .map(|(k, basis)| EventSet::from_basis(k + 1, basis, tol))
        .collect::<Result<Vec<_>, _>>()?;
    let family = HistoryFamily::heisenberg(InitialState::pure(CVector::basis(n, 0), tol)?, sets, tol)?;
    verify(family, n, tol)
}

fn verify(family: HistoryFamily, n: usize, tol: Tolerance) -> Result<WitnessFamily, TheoremError> {
    let fail = |why: String| Err(TheoremError::Construction(why));
    let class = classify(&family, ClassificationMode::Weak, tol)?.classification;
    if class == Classification::None {
        return fail("family does not decohere weakly".into());
    }
    let g = build_graph(&family, tol)?;
    let transitions = classify_transitions(&g, tol);
    let last = g.column_count() - 1;
    let connected = g.connectivity().connected_count(last);
    if connected != n {
        return fail(format!("final connected count {connected}, expected {n}"));
    }
    if let Some(t) = transitions.iter().skip(1).find(|t| !t.is_single_step()) {
        return fail(format!("transition into column {} is {:?}", t.column, t.kind));
    }
    let noncongruent = count_noncongruent(&transitions, last);
    let bound = max_noncongruent_bound(n)?;
    if noncongruent != bound {
        return fail(format!("{noncongruent} noncongruent transitions, bound is {bound}"));
    }
    Ok(WitnessFamily {
        family,
        n,
        transitions,
        noncongruent,
    })
}
