use serde::Serialize;

use crate::histories::{EventSet, HistoryFamily, InitialState};
use crate::numerics::{NumericsError, Tolerance};
use crate::spin::{cross, dot, norm, spin_basis, spin_state, Bloch};

/// Initial polarization `i`, then measurements along `n` and `f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoLevelSpec {
    i: Bloch,
    n: Bloch,
    f: Bloch,
}

impl TwoLevelSpec {
    pub fn new(i: Bloch, n: Bloch, f: Bloch, tol: Tolerance) -> Result<Self, NumericsError> {
        for (name, v) in [("i", i), ("n", n), ("f", f)] {
            if !v.iter().all(|x| x.is_finite()) || (norm(v) - 1.0).abs() > tol.eps() {
                return Err(NumericsError::Degenerate(format!(
                    "{name} = {v:?} is not a unit vector"
                )));
            }
        }
        Ok(Self { i, n, f })
    }

    pub fn i(&self) -> Bloch {
        self.i
    }

    pub fn n(&self) -> Bloch {
        self.n
    }

    pub fn f(&self) -> Bloch {
        self.f
    }
}

/// `(i × n) · (n × f)`.
pub fn two_level_value(s: &TwoLevelSpec) -> f64 {
    dot(cross(s.i, s.n), cross(s.n, s.f))
}

pub fn two_level_condition(s: &TwoLevelSpec, tol: Tolerance) -> bool {
    two_level_value(s).abs() <= tol.eps()
}

pub fn two_level_family(s: &TwoLevelSpec, tol: Tolerance) -> HistoryFamily {
    let initial = InitialState::pure(spin_state(s.i), tol).expect("spin states are normalized");
    let sets = vec![
        EventSet::from_basis(1, spin_basis(s.n), tol).expect("spin basis is orthonormal"),
        EventSet::from_basis(2, spin_basis(s.f), tol).expect("spin basis is orthonormal"),
    ];
    HistoryFamily::heisenberg(initial, sets, tol).expect("qubit family")
}
