use serde::Serialize;

use crate::numerics::Tolerance;
use crate::trajectory::{NodeId, TrajectoryGraph};

/// A connected event that vanishes from column `absent_at` and comes back,
/// up to phase, at `recurs_at`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Recurrence {
    pub event: NodeId,
    pub absent_at: usize,
    pub recurs_at: NodeId,
}

fn congruent_in(g: &TrajectoryGraph, node: NodeId, column: usize, eps: f64) -> Option<usize> {
    let v = g.vector(node);
    g.column(column)
        .iter()
        .position(|w| (w.inner(v).norm() - 1.0).abs() <= eps)
}

/// All (event, absent column, recurrence) triples. The initial state counts
/// as a connected event at column 0.
pub fn detect_recurrence(g: &TrajectoryGraph, tol: Tolerance) -> Vec<Recurrence> {
    let eps = tol.eps();
    let labels = g.connectivity();
    let mut found = Vec::new();
    for event in g.nodes().filter(|n| labels.count(*n) > 0) {
        let later = event.column + 1..g.column_count();
        let hits: Vec<Option<usize>> = later.clone().map(|c| congruent_in(g, event, c, eps)).collect();
        for (ka, k) in later.clone().enumerate() {
            if hits[ka].is_some() {
                continue;
            }
            for (la, l) in later.clone().enumerate().skip(ka + 1) {
                if let Some(index) = hits[la] {
                    found.push(Recurrence {
                        event,
                        absent_at: k,
                        recurs_at: NodeId::new(l, index),
                    });
                }
            }
        }
    }
    found
}
