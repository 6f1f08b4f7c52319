use serde::Serialize;

use super::TheoremError;
use crate::histories::{classify, Classification, ClassificationMode};
use crate::numerics::{CMatrix, Tolerance};
use crate::trajectory::TrajectoryGraph;

/// Row and column indices (basis positions in the two columns) of one block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Block {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl Block {
    pub fn size(&self) -> usize {
        self.rows.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockStructure {
    pub column: usize,
    pub blocks: Vec<Block>,
    /// Connected rows and columns in block order.
    pub row_permutation: Vec<usize>,
    pub col_permutation: Vec<usize>,
    /// Largest modulus among connected-restricted entries outside every block.
    pub off_block_max: f64,
    /// Largest modulus from a connected row into an unconnected column.
    pub leakage: f64,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn unitary_defect(m: &CMatrix, rows: &[usize], cols: &[usize]) -> f64 {
    let mut worst: f64 = 0.0;
    for (x, &r1) in rows.iter().enumerate() {
        for (y, &r2) in rows.iter().enumerate() {
            let dot: crate::numerics::CNum = cols.iter().map(|&c| m[(r1, c)] * m[(r2, c)].conj()).sum();
            let want = if x == y { 1.0 } else { 0.0 };
            worst = worst.max((dot - want).norm());
        }
    }
    worst
}

/// Block structure of the transition `column - 1 → column` restricted to
/// connected events. Requires a weakly decohering graph whose connected count
/// does not change across the transition.
pub fn extract_blocks(g: &TrajectoryGraph, column: usize, tol: Tolerance) -> Result<BlockStructure, TheoremError> {
    if column == 0 || column >= g.column_count() {
        return Err(TheoremError::Domain(format!(
            "transition column {column} outside 1..{}",
            g.column_count()
        )));
    }
    if classify(g.family(), ClassificationMode::Weak, tol)?.classification == Classification::None {
        return Err(TheoremError::Precondition("family does not decohere weakly".into()));
    }
    let labels = g.connectivity();
    let rows = labels.connected(column - 1);
    let cols = labels.connected(column);
    if rows.len() != cols.len() {
        return Err(TheoremError::Precondition(format!(
            "connected count changes from {} to {} across column {column}",
            rows.len(),
            cols.len()
        )));
    }
    let eps = tol.eps();
    let m = g.transition_matrix(column - 1);
    let r = rows.len();
    let mut uf = UnionFind((0..2 * r).collect());
    for (x, &a) in rows.iter().enumerate() {
        for (y, &b) in cols.iter().enumerate() {
            if m[(a, b)].norm() > eps {
                uf.union(x, r + y);
            }
        }
    }

    let mut roots: Vec<usize> = Vec::new();
    let mut blocks: Vec<Block> = Vec::new();
    for k in 0..2 * r {
        let root = uf.find(k);
        let slot = match roots.iter().position(|&q| q == root) {
            Some(s) => s,
            None => {
                roots.push(root);
                blocks.push(Block {
                    rows: Vec::new(),
                    cols: Vec::new(),
                });
                roots.len() - 1
            }
        };
        if k < r {
            blocks[slot].rows.push(rows[k]);
        } else {
            blocks[slot].cols.push(cols[k - r]);
        }
    }

    let mut off_block_max: f64 = 0.0;
    for (x, &a) in rows.iter().enumerate() {
        for (y, &b) in cols.iter().enumerate() {
            if uf.find(x) != uf.find(r + y) {
                off_block_max = off_block_max.max(m[(a, b)].norm());
            }
        }
    }
    let leakage = rows
        .iter()
        .flat_map(|&a| {
            (0..g.column_len(column))
                .filter(|b| !cols.contains(b))
                .map(move |b| (a, b))
        })
        .map(|(a, b)| m[(a, b)].norm())
        .fold(0.0, f64::max);

    let dump = |why: String| {
        Err(TheoremError::Counterexample(format!(
            "{why} at column {column}; connected-restricted matrix rows {rows:?} cols {cols:?}:\n{m}"
        )))
    };
    for b in &blocks {
        if b.rows.len() != b.cols.len() {
            return dump(format!("block {:?}×{:?} is not square", b.rows, b.cols));
        }
        if b.size() > 2 {
            return dump(format!("block of size {} found", b.size()));
        }
        let defect = unitary_defect(m, &b.rows, &b.cols);
        if defect > eps.sqrt() {
            return dump(format!("block {:?} not unitary (defect {defect:e})", b.rows));
        }
    }
    Ok(BlockStructure {
        column,
        row_permutation: blocks.iter().flat_map(|b| b.rows.clone()).collect(),
        col_permutation: blocks.iter().flat_map(|b| b.cols.clone()).collect(),
        blocks,
        off_block_max,
        leakage,
    })
}
