//! Spin-½ states and projectors from Bloch directions.

use crate::numerics::{c, pauli, vector_from_rank_one, CMatrix, CNum, CVector, Tolerance};

pub type Bloch = [f64; 3];

pub fn cross(a: Bloch, b: Bloch) -> Bloch {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn dot(a: Bloch, b: Bloch) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: Bloch) -> f64 {
    dot(a, a).sqrt()
}

/// `(I + n·σ)/2`, the projector onto spin up along `n`.
pub fn spin_projector(n: Bloch) -> CMatrix {
    let [sx, sy, sz] = pauli();
    let mut m = CMatrix::identity(2);
    for (s, k) in [sx, sy, sz].iter().zip(n) {
        m = &m + &s.scale(c(k, 0.0));
    }
    m.scale(c(0.5, 0.0))
}

/// Unit vector polarized along `n` (global phase arbitrary but fixed).
pub fn spin_state(n: Bloch) -> CVector {
    vector_from_rank_one(&spin_projector(n), Tolerance::default()).expect("rank-one projector of a unit direction")
}

/// `[|+n⟩, |−n⟩]`.
pub fn spin_basis(n: Bloch) -> Vec<CVector> {
    vec![spin_state(n), spin_state([-n[0], -n[1], -n[2]])]
}

/// `(⟨σx⟩, ⟨σy⟩, ⟨σz⟩)` of a normalized qubit state.
pub fn bloch_vector(v: &CVector) -> Bloch {
    let (a, b) = (v[0], v[1]);
    let off: CNum = a.conj() * b;
    [2.0 * off.re, 2.0 * off.im, a.norm_sqr() - b.norm_sqr()]
}
