//! Griffiths trajectory graphs.
//!
//! Column 0 holds the pure initial state; column `j ≥ 1` holds the event
//! vectors of the `j`-th fine-grained event set (Heisenberg picture). An
//! edge joins adjacent-column nodes whenever their overlap exceeds eps, and
//! carries that overlap as its amplitude.

mod dot;
#[cfg(test)]
mod dot_grammar;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::histories::{HistoryError, HistoryFamily};
use crate::numerics::{CMatrix, CNum, CVector, Tolerance};

pub use dot::{format_amplitude, to_dot};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error(transparent)]
    History(#[from] HistoryError),
    #[error("trajectory graphs need a pure initial state")]
    MixedState,
    #[error("trajectory graphs need fine-grained events; set {set} is coarse-grained")]
    CoarseGrained { set: usize },
    #[error("node {0} is not in the graph")]
    UnknownNode(NodeId),
}

/// `(column, basis index)`; column 0 is the initial state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NodeId {
    pub column: usize,
    pub index: usize,
}

impl NodeId {
    pub const INITIAL: NodeId = NodeId { column: 0, index: 0 };

    pub fn new(column: usize, index: usize) -> Self {
        NodeId { column, index }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.column == 0 {
            write!(f, "init")
        } else {
            write!(f, "c{}_e{}", self.column, self.index)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
    pub amplitude: CNum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub nodes: Vec<NodeId>,
    pub amplitude: CNum,
}

#[derive(Debug, Clone)]
pub struct TrajectoryGraph {
    family: HistoryFamily,
    columns: Vec<Vec<CVector>>,
    /// `overlaps[c][(a, b)] = ⟨b|a⟩` for node `a` of column `c` and `b` of `c + 1`.
    overlaps: Vec<CMatrix>,
    eps: f64,
}

/// Builds the graph of a pure-state, fine-grained family.
pub fn build_graph(family: &HistoryFamily, tol: Tolerance) -> Result<TrajectoryGraph, GraphError> {
    let family = family.to_heisenberg()?;
    let psi = family.initial().as_pure().ok_or(GraphError::MixedState)?.clone();
    let mut columns = vec![vec![psi]];
    for set in family.event_sets() {
        let vs = set
            .vectors()
            .ok_or(GraphError::CoarseGrained { set: set.time_label() })?;
        columns.push(vs.to_vec());
    }
    let overlaps = columns
        .windows(2)
        .map(|w| {
            let mut m = CMatrix::zeros(w[0].len(), w[1].len());
            for (a, va) in w[0].iter().enumerate() {
                for (b, vb) in w[1].iter().enumerate() {
                    m[(a, b)] = vb.inner(va);
                }
            }
            m
        })
        .collect();
    Ok(TrajectoryGraph {
        family,
        columns,
        overlaps,
        eps: tol.eps(),
    })
}

impl TrajectoryGraph {
    /// The Heisenberg-picture family the graph was built from.
    pub fn family(&self) -> &HistoryFamily {
        &self.family
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn column_len(&self, column: usize) -> usize {
        self.columns.get(column).map_or(0, Vec::len)
    }

    pub fn column(&self, column: usize) -> &[CVector] {
        &self.columns[column]
    }

    pub fn vector(&self, node: NodeId) -> &CVector {
        &self.columns[node.column][node.index]
    }

    pub fn dim(&self) -> usize {
        self.family.dim()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        node.column < self.columns.len() && node.index < self.columns[node.column].len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| (0..col.len()).map(move |i| NodeId::new(c, i)))
    }

    /// Unthresholded overlaps `⟨b|a⟩` from column `column` to `column + 1`.
    pub fn transition_matrix(&self, column: usize) -> &CMatrix {
        &self.overlaps[column]
    }

    /// Edge amplitude, or `None` when the overlap is at most eps.
    pub fn amplitude(&self, from: NodeId, to: NodeId) -> Option<CNum> {
        if to.column != from.column + 1 || !self.contains(from) || !self.contains(to) {
            return None;
        }
        let z = self.overlaps[from.column][(from.index, to.index)];
        (z.norm() > self.eps).then_some(z)
    }

    pub fn out_edges(&self, from: NodeId) -> impl Iterator<Item = Edge> + '_ {
        let next = from.column + 1;
        let n = if next < self.columns.len() && self.contains(from) {
            self.columns[next].len()
        } else {
            0
        };
        (0..n).filter_map(move |b| {
            let to = NodeId::new(next, b);
            self.amplitude(from, to).map(|amplitude| Edge { from, to, amplitude })
        })
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.nodes().flat_map(move |n| self.out_edges(n))
    }

    /// Number of edge paths from `source` to every node, by forward dynamic
    /// programming; saturates at `u64::MAX`.
    pub fn path_counts_from(&self, source: NodeId) -> Vec<Vec<u64>> {
        let mut counts: Vec<Vec<u64>> = self.columns.iter().map(|c| vec![0; c.len()]).collect();
        if !self.contains(source) {
            return counts;
        }
        counts[source.column][source.index] = 1;
        for c in source.column..self.columns.len().saturating_sub(1) {
            for a in 0..self.columns[c].len() {
                let n = counts[c][a];
                if n == 0 {
                    continue;
                }
                for e in self.out_edges(NodeId::new(c, a)) {
                    let slot = &mut counts[c + 1][e.to.index];
                    *slot = slot.saturating_add(n);
                }
            }
        }
        counts
    }

    /// All edge paths from `from` to `to` with their product amplitudes, in
    /// lexicographic order of node indices.
    pub fn enumerate_paths(&self, from: NodeId, to: NodeId) -> Vec<Path> {
        let mut out = Vec::new();
        if !self.contains(from) || !self.contains(to) || from.column >= to.column {
            return out;
        }
        // Only descend into nodes that can still reach the target.
        let reach = self.reaches(to);
        let mut stack = vec![from];
        self.walk(&mut stack, CNum::new(1.0, 0.0), to, &reach, &mut out);
        out
    }

    fn reaches(&self, target: NodeId) -> Vec<Vec<bool>> {
        let mut reach: Vec<Vec<bool>> = self.columns.iter().map(|c| vec![false; c.len()]).collect();
        reach[target.column][target.index] = true;
        for c in (0..target.column).rev() {
            for a in 0..self.columns[c].len() {
                reach[c][a] = self.out_edges(NodeId::new(c, a)).any(|e| reach[c + 1][e.to.index]);
            }
        }
        reach
    }

    fn walk(&self, stack: &mut Vec<NodeId>, amp: CNum, target: NodeId, reach: &[Vec<bool>], out: &mut Vec<Path>) {
        let here = *stack.last().expect("non-empty path");
        if here.column == target.column {
            if here == target {
                out.push(Path {
                    nodes: stack.clone(),
                    amplitude: amp,
                });
            }
            return;
        }
        let next: Vec<Edge> = self
            .out_edges(here)
            .filter(|e| reach[e.to.column][e.to.index])
            .collect();
        for e in next {
            stack.push(e.to);
            self.walk(stack, amp * e.amplitude, target, reach, out);
            stack.pop();
        }
    }

    /// Path amplitudes `⟨k|D_α|j⟩` of every path from `from` to `to`.
    pub fn segment_amplitudes(&self, from: NodeId, to: NodeId) -> Vec<SegmentAmplitude> {
        self.enumerate_paths(from, to)
            .into_iter()
            .map(|p| SegmentAmplitude {
                from,
                to,
                amplitude: p.amplitude,
                path: p.nodes,
            })
            .collect()
    }

    pub fn connectivity(&self) -> ConnectivityLabel {
        ConnectivityLabel {
            counts: self.path_counts_from(NodeId::INITIAL),
        }
    }

    /// Every node pair joined by at most one path (Griffiths' condition, any
    /// node taken as the initial state). `holds_from_initial` restricts the
    /// check to pairs starting at the initial node.
    pub fn noninterference_check(&self) -> NoninterferenceReport {
        let mut first_violation = None;
        let mut holds_from_initial = true;
        for source in self.nodes() {
            let counts = self.path_counts_from(source);
            for target in self.nodes().filter(|t| t.column > source.column) {
                let n = counts[target.column][target.index];
                if n > 1 {
                    if source == NodeId::INITIAL {
                        holds_from_initial = false;
                    }
                    if first_violation.is_none() {
                        first_violation = Some(PairCount {
                            from: source,
                            to: target,
                            paths: n,
                        });
                    }
                }
            }
        }
        NoninterferenceReport {
            holds: first_violation.is_none(),
            holds_from_initial,
            first_violation,
        }
    }

    /// At most two paths between any connected source (the initial node
    /// included) and any later node, and when there are two their amplitudes
    /// satisfy `|Re(a₁·conj(a₂))| ≤ eps·|a₁|·|a₂|`.
    pub fn weak_graph_check(&self, tol: Tolerance) -> WeakGraphReport {
        let labels = self.connectivity();
        let mut violations = Vec::new();
        for source in self.nodes().filter(|n| labels.count(*n) > 0) {
            let counts = self.path_counts_from(source);
            for target in self.nodes().filter(|t| t.column > source.column) {
                let n = counts[target.column][target.index];
                if n > 2 {
                    violations.push(WeakGraphViolation::TooManyPaths(PairCount {
                        from: source,
                        to: target,
                        paths: n,
                    }));
                } else if n == 2 {
                    let paths = self.enumerate_paths(source, target);
                    let (a1, a2) = (paths[0].amplitude, paths[1].amplitude);
                    let re = (a1 * a2.conj()).re;
                    if re.abs() > tol.eps() * a1.norm() * a2.norm() {
                        violations.push(WeakGraphViolation::PhaseNotOrthogonal {
                            from: source,
                            to: target,
                            amplitudes: [a1, a2],
                            real_product: re,
                        });
                    }
                }
            }
        }
        WeakGraphReport {
            holds: violations.is_empty(),
            violations,
        }
    }

    /// Residual of projecting each unconnected vector at `column` onto the span
    /// of the unconnected vectors at `column - 1`; the largest residual norm.
    /// Before the first event set that span is the orthogonal complement of
    /// the initial state.
    pub fn unconnected_span_residual(&self, labels: &ConnectivityLabel, column: usize) -> f64 {
        if column == 0 || column >= self.columns.len() {
            return 0.0;
        }
        if column == 1 {
            let psi = &self.columns[0][0];
            return (0..self.columns[1].len())
                .filter(|&b| labels.count(NodeId::new(1, b)) == 0)
                .map(|b| psi.inner(&self.columns[1][b]).norm())
                .fold(0.0, f64::max);
        }
        let prev: Vec<&CVector> = (0..self.columns[column - 1].len())
            .filter(|&a| labels.count(NodeId::new(column - 1, a)) == 0)
            .map(|a| &self.columns[column - 1][a])
            .collect();
        let mut worst: f64 = 0.0;
        for b in 0..self.columns[column].len() {
            if labels.count(NodeId::new(column, b)) != 0 {
                continue;
            }
            let v = &self.columns[column][b];
            // prev vectors are orthonormal, so the projection is a plain sum
            let mut residual = v.clone();
            for q in &prev {
                residual = &residual - &q.scale(q.inner(v));
            }
            worst = worst.max(residual.norm());
        }
        worst
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentAmplitude {
    pub from: NodeId,
    pub to: NodeId,
    pub path: Vec<NodeId>,
    pub amplitude: CNum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConnectivityClass {
    Unconnected,
    Singly,
    Doubly,
    Over,
}

/// Exact number of paths from the initial node to every node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectivityLabel {
    counts: Vec<Vec<u64>>,
}

impl ConnectivityLabel {
    pub fn count(&self, node: NodeId) -> u64 {
        self.counts
            .get(node.column)
            .and_then(|c| c.get(node.index))
            .copied()
            .unwrap_or(0)
    }

    pub fn class(&self, node: NodeId) -> ConnectivityClass {
        match self.count(node) {
            0 => ConnectivityClass::Unconnected,
            1 => ConnectivityClass::Singly,
            2 => ConnectivityClass::Doubly,
            _ => ConnectivityClass::Over,
        }
    }

    pub fn column_counts(&self, column: usize) -> &[u64] {
        &self.counts[column]
    }

    pub fn columns(&self) -> usize {
        self.counts.len()
    }

    pub fn connected(&self, column: usize) -> Vec<usize> {
        (0..self.counts[column].len())
            .filter(|&i| self.counts[column][i] > 0)
            .collect()
    }

    pub fn connected_count(&self, column: usize) -> usize {
        self.counts[column].iter().filter(|&&n| n > 0).count()
    }

    pub fn singly_count(&self, column: usize) -> usize {
        self.counts[column].iter().filter(|&&n| n == 1).count()
    }

    pub fn doubly_count(&self, column: usize) -> usize {
        self.counts[column].iter().filter(|&&n| n == 2).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairCount {
    pub from: NodeId,
    pub to: NodeId,
    pub paths: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoninterferenceReport {
    pub holds: bool,
    pub holds_from_initial: bool,
    pub first_violation: Option<PairCount>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeakGraphViolation {
    TooManyPaths(PairCount),
    PhaseNotOrthogonal {
        from: NodeId,
        to: NodeId,
        amplitudes: [CNum; 2],
        real_product: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakGraphReport {
    pub holds: bool,
    pub violations: Vec<WeakGraphViolation>,
}
