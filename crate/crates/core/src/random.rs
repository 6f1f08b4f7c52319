//! Seeded generators for states, bases and families.
//!
//! Everything is driven by `ChaCha8Rng` so that a seed reproduces the same
//! output on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::histories::{EventSet, HistoryFamily, InitialState};
use crate::numerics::{orthonormalize, CMatrix, CNum, CVector, Tolerance};
use crate::spin::Bloch;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CVector {
    CVector::new(
        (0..dim)
            .map(|_| CNum::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect(),
    )
}

/// Unit vector with Gaussian-distributed direction.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CVector {
    loop {
        if let Ok(v) = gaussian_vector(rng, dim).normalized(Tolerance::default()) {
            return v;
        }
    }
}

/// Orthonormal basis from Gram–Schmidt on Gaussian vectors.
pub fn random_basis<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<CVector> {
    loop {
        let raw: Vec<CVector> = (0..dim).map(|_| gaussian_vector(rng, dim)).collect();
        if let Ok(b) = orthonormalize(&raw, Tolerance::new(1e-6).expect("valid eps")) {
            return b;
        }
    }
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    CMatrix::from_columns(&random_basis(rng, dim)).expect("square")
}

pub fn random_unit3<R: Rng + ?Sized>(rng: &mut R) -> Bloch {
    loop {
        let v: Bloch = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let n = crate::spin::norm(v);
        if n > 1e-6 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// Pure-state, fine-grained Heisenberg family with independent random bases.
pub fn random_family<R: Rng + ?Sized>(rng: &mut R, dim: usize, columns: usize, tol: Tolerance) -> HistoryFamily {
    let psi = random_state(rng, dim);
    let sets = (0..columns)
        .map(|k| EventSet::from_basis(k + 1, random_basis(rng, dim), tol).expect("orthonormal"))
        .collect();
    HistoryFamily::heisenberg(InitialState::pure(psi, tol).expect("unit"), sets, tol).expect("consistent dims")
}
