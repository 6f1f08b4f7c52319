use serde::Serialize;

use super::TheoremError;
use crate::numerics::Tolerance;
use crate::trajectory::{ConnectivityLabel, TrajectoryGraph};

/// Which kind of change a transition between adjacent columns makes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransitionKind {
    /// Connected events before and after agree up to relabeling and phase.
    CongruentIdentical,
    /// Connected count grows by at least one; doubly count by less than two.
    ConnectedIncrease,
    /// Doubly connected count grows by at least two; connected count does not grow.
    DoublyIncrease,
    Both,
    /// None of the four allowed cases; impossible in a decohering family.
    Anomalous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TransitionClass {
    /// The later column of the transition `column - 1 → column`.
    pub column: usize,
    pub kind: TransitionKind,
    pub delta_connected: i64,
    pub delta_doubly: i64,
}

impl TransitionClass {
    pub fn is_congruent(&self) -> bool {
        self.kind == TransitionKind::CongruentIdentical
    }

    /// Exactly one step of change: connected +1 alone, or doubly +2 alone.
    pub fn is_single_step(&self) -> bool {
        match self.kind {
            TransitionKind::ConnectedIncrease => self.delta_connected == 1,
            TransitionKind::DoublyIncrease => self.delta_doubly == 2,
            _ => false,
        }
    }
}

fn connected_identical(g: &TrajectoryGraph, labels: &ConnectivityLabel, column: usize, tol: Tolerance) -> bool {
    let before = labels.connected(column - 1);
    let after = labels.connected(column);
    if before.len() != after.len() {
        return false;
    }
    let m = g.transition_matrix(column - 1);
    let mut used = vec![false; before.len()];
    for &b in &after {
        let hit = before
            .iter()
            .enumerate()
            .find(|&(k, &a)| !used[k] && (m[(a, b)].norm() - 1.0).abs() <= tol.eps());
        match hit {
            Some((k, _)) => used[k] = true,
            None => return false,
        }
    }
    true
}

/// Classifies the transition from column `column - 1` into `column`.
pub fn classify_transition(
    g: &TrajectoryGraph,
    column: usize,
    tol: Tolerance,
) -> Result<TransitionClass, TheoremError> {
    if column == 0 || column >= g.column_count() {
        return Err(TheoremError::Domain(format!(
            "transition column {column} outside 1..{}",
            g.column_count()
        )));
    }
    let labels = g.connectivity();
    Ok(classify_with(g, &labels, column, tol))
}

pub(crate) fn classify_with(
    g: &TrajectoryGraph,
    labels: &ConnectivityLabel,
    column: usize,
    tol: Tolerance,
) -> TransitionClass {
    let delta_connected = labels.connected_count(column) as i64 - labels.connected_count(column - 1) as i64;
    let delta_doubly = labels.doubly_count(column) as i64 - labels.doubly_count(column - 1) as i64;
    let grew = delta_connected >= 1;
    let doubled = delta_doubly >= 2;
    let kind = if connected_identical(g, labels, column, tol) {
        TransitionKind::CongruentIdentical
    } else if grew && doubled {
        TransitionKind::Both
    } else if grew {
        TransitionKind::ConnectedIncrease
    } else if doubled {
        TransitionKind::DoublyIncrease
    } else {
        TransitionKind::Anomalous
    };
    TransitionClass {
        column,
        kind,
        delta_connected,
        delta_doubly,
    }
}

/// Every transition of the graph, earliest first.
pub fn classify_transitions(g: &TrajectoryGraph, tol: Tolerance) -> Vec<TransitionClass> {
    let labels = g.connectivity();
    (1..g.column_count())
        .map(|c| classify_with(g, &labels, c, tol))
        .collect()
}

/// Noncongruent transitions up to and including `column`, not counting the
/// first one (which only establishes the initial branching).
pub fn count_noncongruent(transitions: &[TransitionClass], column: usize) -> usize {
    transitions
        .iter()
        .filter(|t| t.column <= column && !t.is_congruent())
        .count()
        .saturating_sub(1)
}
