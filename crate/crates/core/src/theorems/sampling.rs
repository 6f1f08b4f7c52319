//! Generators of decohering and deliberately non-decohering families.
//!
//! Noncongruent weak decoherence has measure zero among random families, so
//! the weak generators build families step by step: congruent relabelings,
//! branch steps that split a connected node with an unconnected one, and
//! interference steps on two singly connected nodes whose rotation phase is
//! chosen so the two paths into each new node are π/2 apart.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::seq::SliceRandom;
use rand::Rng;

use super::search::{clifford_group, mix_pair};
use crate::histories::{classify, Classification, ClassificationMode, EventSet, HistoryFamily, InitialState};
use crate::numerics::{c, orthonormalize, CNum, CVector, Tolerance};
use crate::random::{random_basis, random_state, random_unitary};
use crate::trajectory::build_graph;

pub const MAX_REJECTION_ATTEMPTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Sampled { attempts: usize },
    Constructed,
}

struct Builder {
    column: Vec<CVector>,
    counts: Vec<u8>,
    /// Amplitude from the initial state; meaningful for singly connected nodes.
    amps: Vec<CNum>,
}

fn polar(phase: f64) -> CNum {
    CNum::from_polar(1.0, phase)
}

impl Builder {
    fn nodes_with(&self, pred: impl Fn(u8) -> bool) -> Vec<usize> {
        (0..self.counts.len()).filter(|&k| pred(self.counts[k])).collect()
    }

    fn rephase_all<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for k in 0..self.column.len() {
            let z = polar(rng.random_range(0.0..2.0 * PI));
            self.column[k] = self.column[k].scale(z);
            self.amps[k] *= z.conj();
        }
    }

    fn permute<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let mut order: Vec<usize> = (0..self.column.len()).collect();
        order.shuffle(rng);
        self.column = order.iter().map(|&k| self.column[k].clone()).collect();
        self.counts = order.iter().map(|&k| self.counts[k]).collect();
        self.amps = order.iter().map(|&k| self.amps[k]).collect();
    }

    fn mix_unconnected<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let free = self.nodes_with(|n| n == 0);
        if free.len() < 2 {
            return;
        }
        let u = random_unitary(rng, free.len());
        let old: Vec<CVector> = free.iter().map(|&k| self.column[k].clone()).collect();
        for (j, &k) in free.iter().enumerate() {
            let mut v = CVector::zeros(self.column[k].dim());
            for (i, o) in old.iter().enumerate() {
                v = &v + &o.scale(u[(i, j)]);
            }
            self.column[k] = v;
        }
    }

    /// `v_a' = cosθ v_a + e^{iμ} sinθ v_b`, `v_b' = −sinθ v_a + e^{iμ} cosθ v_b`.
    fn rotate(&mut self, a: usize, b: usize, theta: f64, mu: f64) {
        let (va, vb) = (self.column[a].clone(), self.column[b].clone());
        let (s, co) = theta.sin_cos();
        let e = polar(mu);
        self.column[a] = &va.scale(c(co, 0.0)) + &vb.scale(e * s);
        self.column[b] = &va.scale(c(-s, 0.0)) + &vb.scale(e * co);
    }

    fn branch<R: Rng + ?Sized>(&mut self, rng: &mut R, node: usize, free: usize) {
        let theta = rng.random_range(0.25..FRAC_PI_2 - 0.25);
        let mu = rng.random_range(0.0..2.0 * PI);
        let a = self.amps[node];
        self.rotate(node, free, theta, mu);
        self.amps[node] = a * theta.cos();
        self.amps[free] = a * -theta.sin();
        self.counts[free] = self.counts[node];
    }

    fn interfere<R: Rng + ?Sized>(&mut self, rng: &mut R, a: usize, b: usize) {
        let theta = rng.random_range(0.25..FRAC_PI_2 - 0.25);
        let chi = (self.amps[a] * self.amps[b].conj()).arg();
        self.rotate(a, b, theta, FRAC_PI_2 - chi);
        self.counts[a] = 2;
        self.counts[b] = 2;
    }

    fn pick_two<R: Rng + ?Sized>(rng: &mut R, from: &[usize]) -> Option<(usize, usize)> {
        if from.len() < 2 {
            return None;
        }
        let mut v = from.to_vec();
        v.shuffle(rng);
        Some((v[0], v[1]))
    }

    /// One transition. A step without room for its move degrades to a
    /// congruent relabeling.
    fn step<R: Rng + ?Sized>(&mut self, rng: &mut R, allow_interference: bool) {
        let singly = self.nodes_with(|n| n == 1);
        let connected = self.nodes_with(|n| n > 0);
        let free = self.nodes_with(|n| n == 0);
        let choice = rng.random_range(0..if allow_interference { 5 } else { 3 });
        match choice {
            1 | 2 if !free.is_empty() => {
                let node = connected[rng.random_range(0..connected.len())];
                let slot = free[rng.random_range(0..free.len())];
                self.branch(rng, node, slot);
            }
            3 => {
                if let Some((a, b)) = Self::pick_two(rng, &singly) {
                    self.interfere(rng, a, b);
                }
            }
            4 => {
                if let Some((a, b)) = Self::pick_two(rng, &singly) {
                    self.interfere(rng, a, b);
                    if !free.is_empty() {
                        let rest: Vec<usize> = connected.iter().copied().filter(|&k| k != a && k != b).collect();
                        if let Some(&node) = rest.first() {
                            self.branch(rng, node, free[0]);
                        }
                    }
                }
            }
            _ => {
                self.mix_unconnected(rng);
                self.permute(rng);
            }
        }
        self.rephase_all(rng);
    }
}

/// A pure-state fine-grained family built from decoherence-preserving steps.
/// Without interference steps the result decoheres in the medium sense.
pub fn constructive_family<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    columns: usize,
    allow_interference: bool,
    tol: Tolerance,
) -> HistoryFamily {
    let frame = random_basis(rng, dim);
    let support = rng.random_range(1..=dim);
    let weights: Vec<CNum> = random_state(rng, support).entries().to_vec();
    let mut psi = CVector::zeros(dim);
    for (k, w) in weights.iter().enumerate() {
        psi = &psi + &frame[k].scale(*w);
    }
    let mut b = Builder {
        column: frame,
        counts: (0..dim).map(|k| u8::from(k < support)).collect(),
        amps: (0..dim).map(|k| weights.get(k).copied().unwrap_or_default()).collect(),
    };
    b.rephase_all(rng);
    let mut sets = Vec::with_capacity(columns);
    for t in 0..columns {
        if t > 0 {
            b.step(rng, allow_interference);
        }
        let basis = orthonormalize(&b.column, tol).expect("columns stay orthonormal");
        sets.push(EventSet::from_basis(t + 1, basis, tol).expect("orthonormal basis"));
    }
    let initial = InitialState::pure(psi.normalized(tol).expect("unit"), tol).expect("unit");
    HistoryFamily::heisenberg(initial, sets, tol).expect("consistent dims")
}

fn has_noncongruent_change(family: &HistoryFamily, tol: Tolerance) -> bool {
    let Ok(g) = build_graph(family, tol) else {
        return false;
    };
    let t = super::classify_transitions(&g, tol);
    super::count_noncongruent(&t, g.column_count().saturating_sub(1)) > 0
}

/// Discrete random family: a basis vector as initial state, then each set
/// applies a random Clifford to a random pair of the previous set's vectors.
pub fn discrete_family<R: Rng + ?Sized>(rng: &mut R, dim: usize, columns: usize, tol: Tolerance) -> HistoryFamily {
    let group = clifford_group();
    let mut basis: Vec<CVector> = (0..dim).map(|k| CVector::basis(dim, k)).collect();
    let mut sets = Vec::with_capacity(columns);
    for t in 0..columns {
        if dim >= 2 {
            let i = rng.random_range(0..dim);
            let j = (i + rng.random_range(1..dim)) % dim;
            basis = mix_pair(&basis, i, j, &group[rng.random_range(0..group.len())]);
        }
        sets.push(EventSet::from_basis(t + 1, basis.clone(), tol).expect("unitary mix keeps orthonormality"));
    }
    let psi = CVector::basis(dim, rng.random_range(0..dim));
    HistoryFamily::heisenberg(InitialState::pure(psi, tol).expect("unit"), sets, tol).expect("consistent dims")
}

/// Rejection-samples a weakly decohering discrete family with at least one
/// noncongruent transition beyond the first; falls back to the constructive
/// generator after [`MAX_REJECTION_ATTEMPTS`].
pub fn sample_weak_family<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    columns: usize,
    tol: Tolerance,
) -> (HistoryFamily, Origin) {
    for attempts in 1..=MAX_REJECTION_ATTEMPTS {
        let f = discrete_family(rng, dim, columns, tol);
        let weak = classify(&f, ClassificationMode::Weak, tol).is_ok_and(|r| r.classification != Classification::None);
        if weak && has_noncongruent_change(&f, tol) {
            return (f, Origin::Sampled { attempts });
        }
    }
    (constructive_family(rng, dim, columns, true, tol), Origin::Constructed)
}

/// A family in which an event of some set disappears from a later set and
/// then reappears, up to phase, in a set after that. Needs `columns ≥ 3`.
pub fn recurrence_family<R: Rng + ?Sized>(rng: &mut R, dim: usize, columns: usize, tol: Tolerance) -> HistoryFamily {
    assert!(columns >= 3 && dim >= 2, "recurrence needs three sets in dimension ≥ 2");
    let first = rng.random_range(0..columns - 2);
    let again = rng.random_range(first + 2..columns);
    let mut bases: Vec<Vec<CVector>> = (0..columns).map(|_| random_basis(rng, dim)).collect();
    let event = bases[first][rng.random_range(0..dim)].scale(polar(rng.random_range(0.0..2.0 * PI)));
    let mut seed = vec![event];
    seed.extend(random_basis(rng, dim).into_iter().take(dim - 1));
    let mut completed = orthonormalize(&seed, tol).expect("generic completion");
    completed.shuffle(rng);
    bases[again] = completed;
    let sets = bases
        .into_iter()
        .enumerate()
        .map(|(k, b)| EventSet::from_basis(k + 1, b, tol).expect("orthonormal"))
        .collect();
    let psi = random_state(rng, dim);
    HistoryFamily::heisenberg(InitialState::pure(psi, tol).expect("unit"), sets, tol).expect("consistent dims")
}
