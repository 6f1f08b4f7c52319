//! Dense complex linear algebra for the small dimensions (≤ ~16) used by
//! history families, plus the tolerance predicates shared by every module.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use thiserror::Error;

/// Complex amplitude.
pub type CNum = Complex64;

pub const DEFAULT_EPS: f64 = 1e-9;

#[inline]
pub fn c(re: f64, im: f64) -> CNum {
    CNum::new(re, im)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("tolerance must satisfy 0 < eps < 1, got {0}")]
    InvalidTolerance(f64),
}

/// Absolute numeric tolerance, `0 < eps < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance(f64);

impl Tolerance {
    pub fn new(eps: f64) -> Result<Self, NumericsError> {
        if eps.is_finite() && eps > 0.0 && eps < 1.0 {
            Ok(Tolerance(eps))
        } else {
            Err(NumericsError::InvalidTolerance(eps))
        }
    }

    #[inline]
    pub fn eps(self) -> f64 {
        self.0
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance(DEFAULT_EPS)
    }
}

/// Column vector in `C^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct CVector {
    entries: Vec<CNum>,
}

impl CVector {
    pub fn new(entries: Vec<CNum>) -> Self {
        CVector { entries }
    }

    pub fn zeros(dim: usize) -> Self {
        CVector {
            entries: vec![CNum::new(0.0, 0.0); dim],
        }
    }

    /// Standard basis vector `e_index`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.entries[index] = CNum::new(1.0, 0.0);
        v
    }

    pub fn from_real(values: &[f64]) -> Self {
        CVector {
            entries: values.iter().map(|&x| CNum::new(x, 0.0)).collect(),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[CNum] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<CNum> {
        self.entries
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &CVector) -> CNum {
        debug_assert_eq!(self.dim(), other.dim());
        self.entries.iter().zip(&other.entries).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, k: CNum) -> CVector {
        CVector {
            entries: self.entries.iter().map(|z| z * k).collect(),
        }
    }

    pub fn normalized(&self, tol: Tolerance) -> Result<CVector, NumericsError> {
        let n = self.norm();
        if n <= tol.eps() {
            return Err(NumericsError::Degenerate(format!("vector norm {n:e} is not above eps")));
        }
        Ok(self.scale(CNum::new(1.0 / n, 0.0)))
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<usize> for CVector {
    type Output = CNum;
    fn index(&self, i: usize) -> &CNum {
        &self.entries[i]
    }
}

impl IndexMut<usize> for CVector {
    fn index_mut(&mut self, i: usize) -> &mut CNum {
        &mut self.entries[i]
    }
}

impl Add for &CVector {
    type Output = CVector;
    fn add(self, rhs: &CVector) -> CVector {
        CVector {
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CVector {
    type Output = CVector;
    fn sub(self, rhs: &CVector) -> CVector {
        CVector {
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<CNum>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            entries: vec![CNum::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = CNum::new(1.0, 0.0);
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<CNum>) -> Result<Self, NumericsError> {
        if entries.len() != rows * cols {
            return Err(NumericsError::Shape(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(CMatrix { rows, cols, entries })
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<CNum>>) -> Result<Self, NumericsError> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(NumericsError::Shape("ragged rows".into()));
        }
        Ok(CMatrix {
            rows: n_rows,
            cols: n_cols,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[CVector]) -> Result<Self, NumericsError> {
        let dim = columns.first().map_or(0, CVector::dim);
        if columns.iter().any(|v| v.dim() != dim) {
            return Err(NumericsError::Shape("columns of differing dimension".into()));
        }
        let mut m = Self::zeros(dim, columns.len());
        for (j, v) in columns.iter().enumerate() {
            for i in 0..dim {
                m[(i, j)] = v[i];
            }
        }
        Ok(m)
    }

    /// `|a⟩⟨b|`.
    pub fn outer(a: &CVector, b: &CVector) -> Self {
        let mut m = Self::zeros(a.dim(), b.dim());
        for i in 0..a.dim() {
            for j in 0..b.dim() {
                m[(i, j)] = a[i] * b[j].conj();
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[CNum] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[CNum] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> CVector {
        CVector::new((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn scale(&self, k: CNum) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * k).collect(),
        }
    }

    pub fn apply(&self, v: &CVector) -> Result<CVector, NumericsError> {
        if self.cols != v.dim() {
            return Err(NumericsError::Shape(format!(
                "cannot apply {}x{} matrix to vector of dim {}",
                self.rows,
                self.cols,
                v.dim()
            )));
        }
        Ok(CVector::new(
            (0..self.rows)
                .map(|i| self.row(i).iter().zip(v.entries()).map(|(a, b)| a * b).sum())
                .collect(),
        ))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`; shapes must agree.
    pub fn max_abs_diff(&self, other: &CMatrix) -> Result<f64, NumericsError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(NumericsError::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn approx_eq(&self, other: &CMatrix, tol: Tolerance) -> bool {
        self.max_abs_diff(other).is_ok_and(|d| d <= tol.eps())
    }

    pub fn is_hermitian(&self, tol: Tolerance) -> bool {
        self.is_square() && self.approx_eq(&adjoint(self), tol)
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = CNum;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &CNum {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut CNum {
        &mut self.entries[i * self.cols + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    /// Panics on shape mismatch; use [`mat_mul`] for the fallible form.
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        mat_mul(self, rhs).expect("shape mismatch in mul")
    }
}

impl fmt::Display for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self
                .row(i)
                .iter()
                .map(|z| format!("{:+.4}{:+.4}i", z.re, z.im))
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

pub fn mat_mul(a: &CMatrix, b: &CMatrix) -> Result<CMatrix, NumericsError> {
    if a.cols != b.rows {
        return Err(NumericsError::Shape(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut out = CMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a[(i, k)];
            if aik.re == 0.0 && aik.im == 0.0 {
                continue;
            }
            let b_row = b.row(k);
            let out_row = &mut out.entries[i * b.cols..(i + 1) * b.cols];
            for (o, bkj) in out_row.iter_mut().zip(b_row) {
                *o += aik * bkj;
            }
        }
    }
    Ok(out)
}

/// Conjugate transpose.
pub fn adjoint(a: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(a.cols, a.rows);
    for i in 0..a.rows {
        for j in 0..a.cols {
            out[(j, i)] = a[(i, j)].conj();
        }
    }
    out
}

pub fn trace(a: &CMatrix) -> Result<CNum, NumericsError> {
    if !a.is_square() {
        return Err(NumericsError::Shape(format!(
            "trace of non-square {}x{} matrix",
            a.rows, a.cols
        )));
    }
    Ok((0..a.rows).map(|i| a[(i, i)]).sum())
}

/// `Tr(a · b†)` without forming the product.
pub fn trace_with_adjoint(a: &CMatrix, b: &CMatrix) -> Result<CNum, NumericsError> {
    if a.rows != b.rows || a.cols != b.cols {
        return Err(NumericsError::Shape(format!(
            "Tr(A B†) needs equal shapes, got {}x{} and {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    Ok(a.entries.iter().zip(&b.entries).map(|(x, y)| x * y.conj()).sum())
}

/// True iff every entry of `U†U − I` has modulus ≤ eps.
pub fn is_unitary(u: &CMatrix, tol: Tolerance) -> bool {
    if !u.is_square() {
        return false;
    }
    let gram = &adjoint(u) * u;
    gram.approx_eq(&CMatrix::identity(u.rows), tol)
}

/// Gram matrix of `vs` within eps of the identity.
pub fn is_orthonormal_basis(vs: &[CVector], tol: Tolerance) -> Result<bool, NumericsError> {
    let Some(first) = vs.first() else {
        return Ok(false);
    };
    let dim = first.dim();
    if vs.iter().any(|v| v.dim() != dim) {
        return Err(NumericsError::Shape("basis vectors of mixed dimension".into()));
    }
    if vs.len() != dim {
        return Ok(false);
    }
    for (i, a) in vs.iter().enumerate() {
        for (j, b) in vs.iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            if (a.inner(b) - CNum::new(expected, 0.0)).norm() > tol.eps() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `|v̂⟩⟨v̂|` for the normalized direction of `v`.
pub fn projector_from_vector(v: &CVector) -> Result<CMatrix, NumericsError> {
    let unit = v.normalized(Tolerance::default())?;
    Ok(CMatrix::outer(&unit, &unit))
}

/// Unit vector spanning the range of a rank-one projector.
///
/// Takes the column of largest norm and normalizes it, so the result carries
/// an arbitrary global phase.
pub fn vector_from_rank_one(p: &CMatrix, tol: Tolerance) -> Result<CVector, NumericsError> {
    if !p.is_square() {
        return Err(NumericsError::Shape("projector must be square".into()));
    }
    let best = (0..p.cols())
        .map(|j| (j, p.column(j).norm_sqr()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(j, _)| j)
        .ok_or_else(|| NumericsError::Degenerate("empty projector".into()))?;
    p.column(best).normalized(tol)
}

/// Positive semidefiniteness of a Hermitian matrix via Cholesky of `m + eps·I`.
pub fn is_positive_semidefinite(m: &CMatrix, tol: Tolerance) -> bool {
    if !m.is_hermitian(tol) {
        return false;
    }
    let n = m.rows();
    let shift = tol.eps() * n.max(1) as f64;
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut diag = m[(j, j)].re + shift;
        for k in 0..j {
            diag -= l[(j, k)].norm_sqr();
        }
        if diag <= 0.0 {
            return false;
        }
        let d = diag.sqrt();
        l[(j, j)] = CNum::new(d, 0.0);
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / d;
        }
    }
    true
}

/// Gram–Schmidt on the given vectors; fails if they are linearly dependent
/// at tolerance scale.
pub fn orthonormalize(vs: &[CVector], tol: Tolerance) -> Result<Vec<CVector>, NumericsError> {
    let mut out: Vec<CVector> = Vec::with_capacity(vs.len());
    for v in vs {
        let mut w = v.clone();
        // two passes keep the result orthogonal to working precision
        for _ in 0..2 {
            for q in &out {
                let proj = q.inner(&w);
                w = &w - &q.scale(proj);
            }
        }
        out.push(w.normalized(tol)?);
    }
    Ok(out)
}

/// The Pauli matrices `σx, σy, σz`.
pub fn pauli() -> [CMatrix; 3] {
    let o = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [
        CMatrix::from_row_major(2, 2, vec![o, one, one, o]).unwrap(),
        CMatrix::from_row_major(2, 2, vec![o, -i, i, o]).unwrap(),
        CMatrix::from_row_major(2, 2, vec![one, o, o, -one]).unwrap(),
    ]
}
