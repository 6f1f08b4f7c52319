//! JSON family files and report documents.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major nested
//! arrays. A family file looks like
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "initial_state": { "pure": [[1, 0], [0, 0]] },
//!   "picture": "heisenberg",
//!   "event_sets": [ { "basis": [[[0.7071, 0], [0.7071, 0]], [[0.7071, 0], [-0.7071, 0]]] } ],
//!   "eps": 1e-9
//! }
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::histories::{
    Classification, ClassificationMode, DecoherenceReport, EventSet, HistoryError, HistoryFamily, InitialState, Picture,
};
use crate::numerics::{CMatrix, CNum, CVector, NumericsError, Tolerance, DEFAULT_EPS};
use crate::theorems::{TheoremSuiteReport, TransitionClass};

pub type ComplexDoc = [f64; 2];
pub type VectorDoc = Vec<ComplexDoc>;
pub type MatrixDoc = Vec<Vec<ComplexDoc>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum StateDoc {
    Pure(VectorDoc),
    Density(MatrixDoc),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum EventSetDoc {
    Basis(Vec<VectorDoc>),
    Projectors(Vec<MatrixDoc>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDocument {
    pub dimension: usize,
    pub initial_state: StateDoc,
    pub picture: Picture,
    pub event_sets: Vec<EventSetDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval_unitaries: Option<Vec<MatrixDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DocumentError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{location}: {reason}")]
    Invalid { location: String, reason: String },
    #[error(transparent)]
    History(#[from] HistoryError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

fn invalid(location: impl Into<String>, reason: impl Into<String>) -> DocumentError {
    DocumentError::Invalid {
        location: location.into(),
        reason: reason.into(),
    }
}

fn to_complex(z: &ComplexDoc) -> CNum {
    CNum::new(z[0], z[1])
}

fn from_complex(z: CNum) -> ComplexDoc {
    // -0.0 would print as "-0.0"
    [z.re + 0.0, z.im + 0.0]
}

fn vector(doc: &VectorDoc, dim: usize, location: &str) -> Result<CVector, DocumentError> {
    if doc.len() != dim {
        return Err(invalid(
            location,
            format!("length {} does not match dimension {dim}", doc.len()),
        ));
    }
    Ok(CVector::new(doc.iter().map(to_complex).collect()))
}

fn matrix(doc: &MatrixDoc, dim: usize, location: &str) -> Result<CMatrix, DocumentError> {
    if doc.len() != dim || doc.iter().any(|r| r.len() != dim) {
        return Err(invalid(location, format!("matrix must be {dim}×{dim}")));
    }
    let rows = doc.iter().map(|r| r.iter().map(to_complex).collect()).collect();
    Ok(CMatrix::from_rows(rows)?)
}

pub fn vector_doc(v: &CVector) -> VectorDoc {
    v.entries().iter().map(|z| from_complex(*z)).collect()
}

pub fn matrix_doc(m: &CMatrix) -> MatrixDoc {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|z| from_complex(*z)).collect())
        .collect()
}

impl FamilyDocument {
    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        serde_json::from_str(text).map_err(|e| DocumentError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }

    /// `flag` overrides the file's `eps`, which overrides the default.
    pub fn tolerance(&self, flag: Option<f64>) -> Result<Tolerance, DocumentError> {
        let eps = flag.or(self.eps).unwrap_or(DEFAULT_EPS);
        Tolerance::new(eps).map_err(|e| invalid("eps", e.to_string()))
    }

    pub fn to_family(&self, tol: Tolerance) -> Result<HistoryFamily, DocumentError> {
        let dim = self.dimension;
        if dim == 0 {
            return Err(invalid("dimension", "must be at least 1"));
        }
        let initial = match &self.initial_state {
            StateDoc::Pure(v) => InitialState::pure(vector(v, dim, "initial_state")?, tol)?,
            StateDoc::Density(m) => InitialState::mixed(matrix(m, dim, "initial_state")?, tol)?,
        };
        let mut sets = Vec::with_capacity(self.event_sets.len());
        for (k, doc) in self.event_sets.iter().enumerate() {
            let label = k + 1;
            let set = match doc {
                EventSetDoc::Basis(vs) => {
                    let basis = vs
                        .iter()
                        .enumerate()
                        .map(|(j, v)| vector(v, dim, &format!("event set {label}, vector {}", j + 1)))
                        .collect::<Result<Vec<_>, _>>()?;
                    EventSet::from_basis(label, basis, tol)?
                }
                EventSetDoc::Projectors(ps) => {
                    let projectors = ps
                        .iter()
                        .enumerate()
                        .map(|(j, m)| matrix(m, dim, &format!("event set {label}, projector {}", j + 1)))
                        .collect::<Result<Vec<_>, _>>()?;
                    EventSet::from_projectors(label, projectors, tol)?
                }
            };
            sets.push(set);
        }
        let unitaries = match &self.interval_unitaries {
            None => None,
            Some(us) => Some(
                us.iter()
                    .enumerate()
                    .map(|(k, m)| matrix(m, dim, &format!("interval unitary {}", k + 1)))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
        };
        Ok(HistoryFamily::new(initial, sets, self.picture, unitaries, tol)?)
    }

    pub fn from_family(family: &HistoryFamily, eps: Option<f64>) -> Self {
        let initial_state = match family.initial() {
            InitialState::Pure(v) => StateDoc::Pure(vector_doc(v)),
            InitialState::Mixed(m) => StateDoc::Density(matrix_doc(m)),
        };
        let event_sets = family
            .event_sets()
            .iter()
            .map(|s| match s.vectors().filter(|_| s.is_basis_form()) {
                Some(vs) => EventSetDoc::Basis(vs.iter().map(vector_doc).collect()),
                None => EventSetDoc::Projectors(s.projectors().iter().map(matrix_doc).collect()),
            })
            .collect();
        FamilyDocument {
            dimension: family.dim(),
            initial_state,
            picture: family.picture(),
            event_sets,
            interval_unitaries: family
                .interval_unitaries()
                .map(|us| us.iter().map(matrix_doc).collect()),
            eps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityRow {
    pub history: String,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationRow {
    pub alpha: String,
    pub beta: String,
    pub value: ComplexDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnSummary {
    pub column: usize,
    pub connected: usize,
    pub singly: usize,
    pub doubly: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessSummary {
    pub n: usize,
    pub seed: u64,
    pub noncongruent: usize,
    pub bound: usize,
    pub transitions: Vec<TransitionClass>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoLevelReport {
    pub i: [f64; 3],
    pub n: [f64; 3],
    pub f: [f64; 3],
    pub value: f64,
    pub condition: bool,
    pub agreement: String,
}

/// Machine-readable output of every command. Field order is fixed and
/// nothing depends on wall-clock time unless `timing_ms` is requested.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub command: String,
    pub eps: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<ClassificationMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<Classification>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub satisfied: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub probabilities: Vec<ProbabilityRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pruned_histories: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_matrix: Option<MatrixDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violations: Option<Vec<ViolationRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub connectivity: Option<Vec<ColumnSummary>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorems: Option<TheoremSuiteReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub two_level: Option<TwoLevelReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl ReportDocument {
    pub fn new(command: &str, eps: f64) -> Self {
        ReportDocument {
            command: command.to_string(),
            eps,
            mode: None,
            classification: None,
            satisfied: None,
            probabilities: Vec::new(),
            pruned_histories: None,
            d_matrix: None,
            violations: None,
            connectivity: None,
            theorems: None,
            witness: None,
            two_level: None,
            timing_ms: None,
        }
    }

    /// Fills the classification fields from a decoherence report.
    pub fn with_decoherence(mut self, report: &DecoherenceReport, include_d: bool) -> Self {
        let f = &report.functional;
        self.mode = Some(report.mode);
        self.classification = Some(report.classification);
        self.satisfied = Some(report.satisfied());
        self.probabilities = f
            .histories
            .iter()
            .zip(&f.probabilities)
            .map(|(h, p)| ProbabilityRow {
                history: h.to_string(),
                probability: *p,
            })
            .collect();
        self.pruned_histories = Some(f.pruned);
        if include_d {
            self.d_matrix = Some(matrix_doc(&f.d_matrix));
        }
        self.violations = Some(
            report
                .violations
                .iter()
                .map(|v| ViolationRow {
                    alpha: v.alpha.to_string(),
                    beta: v.beta.to_string(),
                    value: from_complex(v.value),
                })
                .collect(),
        );
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// `a+bi` with six decimals.
pub fn format_complex(z: CNum) -> String {
    let (re, im) = (z.re + 0.0, z.im + 0.0);
    let (re, im) = (
        if re.abs() < 5e-7 { 0.0 } else { re },
        if im.abs() < 5e-7 { 0.0 } else { im },
    );
    if im < 0.0 {
        format!("{re:.6}-{:.6}i", -im)
    } else {
        format!("{re:.6}+{im:.6}i")
    }
}
