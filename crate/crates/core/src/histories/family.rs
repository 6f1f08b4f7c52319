use std::fmt;

use serde::{Deserialize, Serialize};

use super::HistoryError;
use crate::numerics::{
    adjoint, is_orthonormal_basis, is_positive_semidefinite, is_unitary, mat_mul, trace, trace_with_adjoint,
    vector_from_rank_one, CMatrix, CNum, CVector, Tolerance,
};

/// Upper bound on the number of histories materialized in one computation.
pub const HISTORY_CAP: usize = 20_000;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Pure(CVector),
    Mixed(CMatrix),
}

impl InitialState {
    /// Pure state; the vector must have unit norm within eps.
    pub fn pure(psi: CVector, tol: Tolerance) -> Result<Self, HistoryError> {
        if !psi.is_finite() {
            return Err(HistoryError::InvalidState("state vector has non-finite entries".into()));
        }
        if (psi.norm() - 1.0).abs() > tol.eps() {
            return Err(HistoryError::InvalidState(format!(
                "pure state has norm {:.12}, expected 1",
                psi.norm()
            )));
        }
        Ok(InitialState::Pure(psi))
    }

    /// Density operator: Hermitian, positive semidefinite, unit trace.
    pub fn mixed(rho: CMatrix, tol: Tolerance) -> Result<Self, HistoryError> {
        if !rho.is_square() {
            return Err(HistoryError::InvalidState("density operator must be square".into()));
        }
        if !rho.is_finite() {
            return Err(HistoryError::InvalidState(
                "density operator has non-finite entries".into(),
            ));
        }
        if !rho.is_hermitian(tol) {
            return Err(HistoryError::InvalidState("density operator is not Hermitian".into()));
        }
        let tr = trace(&rho)?;
        if (tr - CNum::new(1.0, 0.0)).norm() > tol.eps() {
            return Err(HistoryError::InvalidState(format!(
                "density operator has trace {:.12}, expected 1",
                tr.re
            )));
        }
        if !is_positive_semidefinite(&rho, tol) {
            return Err(HistoryError::InvalidState(
                "density operator is not positive semidefinite".into(),
            ));
        }
        Ok(InitialState::Mixed(rho))
    }

    pub fn dim(&self) -> usize {
        match self {
            InitialState::Pure(v) => v.dim(),
            InitialState::Mixed(m) => m.rows(),
        }
    }

    pub fn density(&self) -> CMatrix {
        match self {
            InitialState::Pure(v) => CMatrix::outer(v, v),
            InitialState::Mixed(m) => m.clone(),
        }
    }

    pub fn as_pure(&self) -> Option<&CVector> {
        match self {
            InitialState::Pure(v) => Some(v),
            InitialState::Mixed(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    Fine,
    Coarse,
}

/// A complete set of mutually orthogonal projectors at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct EventSet {
    time_label: usize,
    projectors: Vec<CMatrix>,
    granularity: Granularity,
    /// Unit vectors spanning each projector; present iff fine-grained.
    vectors: Option<Vec<CVector>>,
    from_basis: bool,
}

impl EventSet {
    /// Fine-grained set `{|v⟩⟨v|}` from an orthonormal basis.
    pub fn from_basis(time_label: usize, basis: Vec<CVector>, tol: Tolerance) -> Result<Self, HistoryError> {
        if basis.is_empty() {
            return Err(HistoryError::ResolutionOfIdentity { set: time_label });
        }
        if basis.iter().any(|v| !v.is_finite()) {
            return Err(HistoryError::NonFinite { set: time_label });
        }
        let dim = basis[0].dim();
        if basis.iter().any(|v| v.dim() != dim) {
            return Err(HistoryError::DimensionMismatch {
                what: format!("basis vectors of set {time_label}"),
                expected: dim,
                found: basis.iter().map(CVector::dim).find(|&d| d != dim).unwrap_or(dim),
            });
        }
        if basis.len() != dim {
            return Err(HistoryError::ResolutionOfIdentity { set: time_label });
        }
        if !is_orthonormal_basis(&basis, tol)? {
            return Err(HistoryError::NotOrthonormal { set: time_label });
        }
        let projectors = basis.iter().map(|v| CMatrix::outer(v, v)).collect();
        Ok(EventSet {
            time_label,
            projectors,
            granularity: Granularity::Fine,
            vectors: Some(basis),
            from_basis: true,
        })
    }

    /// Validates completeness and orthogonality of an explicit projector list.
    pub fn from_projectors(time_label: usize, projectors: Vec<CMatrix>, tol: Tolerance) -> Result<Self, HistoryError> {
        let Some(first) = projectors.first() else {
            return Err(HistoryError::ResolutionOfIdentity { set: time_label });
        };
        let dim = first.rows();
        for p in &projectors {
            if !p.is_square() || p.rows() != dim {
                return Err(HistoryError::DimensionMismatch {
                    what: format!("projectors of set {time_label}"),
                    expected: dim,
                    found: p.rows().max(p.cols()),
                });
            }
            if !p.is_finite() {
                return Err(HistoryError::NonFinite { set: time_label });
            }
        }
        for (a, p) in projectors.iter().enumerate() {
            if !p.is_hermitian(tol) {
                return Err(HistoryError::NotProjector {
                    set: time_label,
                    index: a,
                });
            }
        }
        for (a, pa) in projectors.iter().enumerate() {
            for (b, pb) in projectors.iter().enumerate() {
                let prod = mat_mul(pa, pb)?;
                let expected = if a == b { pb.clone() } else { CMatrix::zeros(dim, dim) };
                if !prod.approx_eq(&expected, tol) {
                    return Err(if a == b {
                        HistoryError::NotProjector {
                            set: time_label,
                            index: a,
                        }
                    } else {
                        HistoryError::NotOrthogonal { set: time_label, a, b }
                    });
                }
            }
        }
        let mut sum = CMatrix::zeros(dim, dim);
        for p in &projectors {
            sum = &sum + p;
        }
        if !sum.approx_eq(&CMatrix::identity(dim), tol) {
            return Err(HistoryError::ResolutionOfIdentity { set: time_label });
        }
        let fine = projectors
            .iter()
            .all(|p| trace(p).is_ok_and(|t| (t.re - 1.0).abs() <= tol.eps()));
        let vectors = if fine {
            Some(
                projectors
                    .iter()
                    .map(|p| vector_from_rank_one(p, tol))
                    .collect::<Result<Vec<_>, _>>()?,
            )
        } else {
            None
        };
        Ok(EventSet {
            time_label,
            projectors,
            granularity: if fine { Granularity::Fine } else { Granularity::Coarse },
            vectors,
            from_basis: false,
        })
    }

    pub fn time_label(&self) -> usize {
        self.time_label
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].rows()
    }

    pub fn granularity(&self) -> Granularity {
        self.granularity
    }

    pub fn is_fine(&self) -> bool {
        self.granularity == Granularity::Fine
    }

    /// Event vectors for a fine-grained set.
    pub fn vectors(&self) -> Option<&[CVector]> {
        self.vectors.as_deref()
    }

    /// Whether the set was specified as a basis (as opposed to projectors).
    pub fn is_basis_form(&self) -> bool {
        self.from_basis
    }

    pub(crate) fn with_time_label(mut self, label: usize) -> Self {
        self.time_label = label;
        self
    }

    /// `V† P V` for every projector (and `V† v` for every vector).
    pub(crate) fn conjugated(&self, v: &CMatrix) -> Self {
        let vd = adjoint(v);
        EventSet {
            time_label: self.time_label,
            projectors: self.projectors.iter().map(|p| &(&vd * p) * v).collect(),
            granularity: self.granularity,
            vectors: self
                .vectors
                .as_ref()
                .map(|vs| vs.iter().map(|x| vd.apply(x).expect("dimension checked")).collect()),
            from_basis: self.from_basis,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Picture {
    Heisenberg,
    Schrodinger,
}

/// Event choice per event set, earliest first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HistoryIndex(pub Vec<usize>);

impl HistoryIndex {
    pub fn choices(&self) -> &[usize] {
        &self.0
    }

    pub fn final_event(&self) -> Option<usize> {
        self.0.last().copied()
    }
}

impl fmt::Display for HistoryIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Initial state plus time-ordered event sets.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryFamily {
    initial: InitialState,
    event_sets: Vec<EventSet>,
    picture: Picture,
    interval_unitaries: Option<Vec<CMatrix>>,
}

impl HistoryFamily {
    pub fn new(
        initial: InitialState,
        event_sets: Vec<EventSet>,
        picture: Picture,
        interval_unitaries: Option<Vec<CMatrix>>,
        tol: Tolerance,
    ) -> Result<Self, HistoryError> {
        let dim = initial.dim();
        if dim == 0 {
            return Err(HistoryError::InvalidState("zero-dimensional state space".into()));
        }
        for set in &event_sets {
            if set.dim() != dim {
                return Err(HistoryError::DimensionMismatch {
                    what: format!("event set {}", set.time_label),
                    expected: dim,
                    found: set.dim(),
                });
            }
        }
        for w in event_sets.windows(2) {
            if w[1].time_label <= w[0].time_label {
                return Err(HistoryError::TimeOrder {
                    earlier: w[0].time_label,
                    later: w[1].time_label,
                });
            }
        }
        match (picture, &interval_unitaries) {
            (Picture::Schrodinger, None) => {
                return Err(HistoryError::Configuration(
                    "schrodinger-picture family needs interval unitaries".into(),
                ))
            }
            (Picture::Heisenberg, Some(_)) => {
                return Err(HistoryError::Configuration(
                    "interval unitaries are only meaningful in the schrodinger picture".into(),
                ))
            }
            (Picture::Schrodinger, Some(us)) => {
                if us.len() != event_sets.len() {
                    return Err(HistoryError::Configuration(format!(
                        "{} interval unitaries for {} event sets",
                        us.len(),
                        event_sets.len()
                    )));
                }
                for (k, u) in us.iter().enumerate() {
                    if u.rows() != dim || u.cols() != dim {
                        return Err(HistoryError::DimensionMismatch {
                            what: format!("interval unitary {}", k + 1),
                            expected: dim,
                            found: u.rows().max(u.cols()),
                        });
                    }
                    if !is_unitary(u, tol) {
                        return Err(HistoryError::NotUnitary { interval: k + 1 });
                    }
                }
            }
            (Picture::Heisenberg, None) => {}
        }
        Ok(HistoryFamily {
            initial,
            event_sets,
            picture,
            interval_unitaries,
        })
    }

    /// Heisenberg-picture family over the given sets, labelled `1..=n`.
    pub fn heisenberg(initial: InitialState, event_sets: Vec<EventSet>, tol: Tolerance) -> Result<Self, HistoryError> {
        let sets = event_sets
            .into_iter()
            .enumerate()
            .map(|(k, s)| s.with_time_label(k + 1))
            .collect();
        Self::new(initial, sets, Picture::Heisenberg, None, tol)
    }

    pub fn initial(&self) -> &InitialState {
        &self.initial
    }

    pub fn event_sets(&self) -> &[EventSet] {
        &self.event_sets
    }

    pub fn picture(&self) -> Picture {
        self.picture
    }

    pub fn interval_unitaries(&self) -> Option<&[CMatrix]> {
        self.interval_unitaries.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.initial.dim()
    }

    pub fn is_fine_grained(&self) -> bool {
        self.event_sets.iter().all(EventSet::is_fine)
    }

    /// Size of the full Cartesian product of event choices (saturating).
    pub fn history_count(&self) -> usize {
        self.event_sets
            .iter()
            .fold(1usize, |acc, s| acc.saturating_mul(s.len()))
    }

    /// Every history, lexicographic with the earliest event most significant.
    pub fn histories(&self) -> impl Iterator<Item = HistoryIndex> + '_ {
        let radices: Vec<usize> = self.event_sets.iter().map(EventSet::len).collect();
        let total = self.history_count();
        (0..total).map(move |mut n| {
            let mut digits = vec![0; radices.len()];
            for (d, &r) in digits.iter_mut().zip(&radices).rev() {
                *d = n % r;
                n /= r;
            }
            HistoryIndex(digits)
        })
    }

    /// Equivalent family in the Heisenberg picture. A Heisenberg family is
    /// returned unchanged.
    pub fn to_heisenberg(&self) -> Result<HistoryFamily, HistoryError> {
        if self.picture == Picture::Heisenberg {
            return Ok(self.clone());
        }
        let unitaries = self
            .interval_unitaries
            .as_ref()
            .ok_or_else(|| HistoryError::Configuration("schrodinger-picture family needs interval unitaries".into()))?;
        let mut evolution = CMatrix::identity(self.dim());
        let mut sets = Vec::with_capacity(self.event_sets.len());
        for (set, u) in self.event_sets.iter().zip(unitaries) {
            evolution = mat_mul(u, &evolution)?;
            sets.push(set.conjugated(&evolution));
        }
        Ok(HistoryFamily {
            initial: self.initial.clone(),
            event_sets: sets,
            picture: Picture::Heisenberg,
            interval_unitaries: None,
        })
    }

    fn check_index(&self, idx: &HistoryIndex) -> Result<(), HistoryError> {
        if idx.0.len() != self.event_sets.len() {
            return Err(HistoryError::IndexOutOfRange(format!(
                "history {idx} has {} choices for {} event sets",
                idx.0.len(),
                self.event_sets.len()
            )));
        }
        for (k, (&a, set)) in idx.0.iter().zip(&self.event_sets).enumerate() {
            if a >= set.len() {
                return Err(HistoryError::IndexOutOfRange(format!(
                    "choice {a} at position {k} exceeds {} events",
                    set.len()
                )));
            }
        }
        Ok(())
    }

    /// `C_α = P_{α_n}(t_n) ⋯ P_{α_1}(t_1)`, latest event leftmost.
    pub fn chain_operator(&self, idx: &HistoryIndex) -> Result<CMatrix, HistoryError> {
        if self.picture != Picture::Heisenberg {
            return Err(HistoryError::Picture);
        }
        self.check_index(idx)?;
        let mut chain = CMatrix::identity(self.dim());
        for (&a, set) in idx.0.iter().zip(&self.event_sets) {
            chain = mat_mul(&set.projectors[a], &chain)?;
        }
        Ok(chain)
    }

    /// `p(α) = Tr(C_α ρ C_α†)`, clamped to `[0, 1]`.
    pub fn history_probability(&self, idx: &HistoryIndex) -> Result<f64, HistoryError> {
        let family = self.to_heisenberg()?;
        let chain = family.chain_operator(idx)?;
        let rho = family.initial.density();
        let p = trace_with_adjoint(&mat_mul(&chain, &rho)?, &chain)?;
        Ok(p.re.clamp(0.0, 1.0))
    }

    /// Inserts `set` before position `position` (0-based among event sets)
    /// and relabels times `1..=n`. Heisenberg picture only.
    pub fn with_inserted(&self, position: usize, set: EventSet, tol: Tolerance) -> Result<HistoryFamily, HistoryError> {
        if self.picture != Picture::Heisenberg {
            return Err(HistoryError::Picture);
        }
        if position > self.event_sets.len() {
            return Err(HistoryError::IndexOutOfRange(format!(
                "insertion position {position} beyond {} event sets",
                self.event_sets.len()
            )));
        }
        let mut sets = self.event_sets.clone();
        sets.insert(position, set);
        Self::heisenberg(self.initial.clone(), sets, tol)
    }

    /// The family restricted to its first `count` event sets.
    pub fn truncated(&self, count: usize) -> HistoryFamily {
        let count = count.min(self.event_sets.len());
        HistoryFamily {
            initial: self.initial.clone(),
            event_sets: self.event_sets[..count].to_vec(),
            picture: self.picture,
            interval_unitaries: self.interval_unitaries.as_ref().map(|u| u[..count].to_vec()),
        }
    }
}
