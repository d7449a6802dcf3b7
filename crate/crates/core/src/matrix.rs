//! Dense matrices, observation masks and the proximal operators the solvers
//! are built from.
//!
//! [`Matrix`] wraps a column-major `nalgebra` matrix but is constructed and
//! printed in row-major logical order. Every stored entry is finite; missing
//! data is only ever expressed through a [`Mask`].

use std::fmt;
use std::ops::{Add, Index, Mul, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq)]
pub struct Matrix {
    inner: DMatrix<f64>,
}

impl Matrix {
    /// All-zero matrix. Panics on an empty shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix shape must be positive");
        Self {
            inner: DMatrix::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "matrix shape must be positive");
        Self {
            inner: DMatrix::identity(n, n),
        }
    }

    /// Square diagonal matrix with the given diagonal.
    pub fn diag(values: &[f64]) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::InvalidArgument("empty diagonal".into()));
        }
        let mut inner = DMatrix::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            inner[(i, i)] = v;
        }
        Self::from_dmatrix(inner)
    }

    pub fn from_row_major(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "matrix shape must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::dims(rows * cols, data.len()));
        }
        Self::from_dmatrix(DMatrix::from_row_slice(rows, cols, data))
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            let row = row.as_ref();
            if row.len() != c {
                return Err(Error::dims(format!("{c} columns"), format!("{} columns", row.len())));
            }
            data.extend_from_slice(row);
        }
        Self::from_row_major(r, c, &data)
    }

    /// Wraps an `nalgebra` matrix, rejecting empty shapes and non-finite entries.
    pub fn from_dmatrix(inner: DMatrix<f64>) -> Result<Self> {
        if inner.nrows() == 0 || inner.ncols() == 0 {
            return Err(Error::InvalidArgument("matrix shape must be positive".into()));
        }
        for j in 0..inner.ncols() {
            for i in 0..inner.nrows() {
                if !inner[(i, j)].is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self { inner })
    }

    /// Internal constructor for results of finite arithmetic.
    pub(crate) fn wrap(inner: DMatrix<f64>) -> Self {
        debug_assert!(inner.iter().all(|v| v.is_finite()));
        Self { inner }
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.inner.shape()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.inner[(row, col)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.inner
    }

    pub fn into_dmatrix(self) -> DMatrix<f64> {
        self.inner
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.inner[(i, j)]);
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::wrap(self.inner.transpose())
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols() != other.rows() {
            return Err(Error::dims(
                format!("{} rows", self.cols()),
                format!("{} rows", other.rows()),
            ));
        }
        Ok(Matrix::wrap(&self.inner * &other.inner))
    }

    /// Frobenius inner product `Σ a_ij b_ij`.
    pub fn dot(&self, other: &Matrix) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self.inner.dot(&other.inner))
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl FnMut(f64) -> f64) -> Result<Matrix> {
        Matrix::from_dmatrix(self.inner.map(f))
    }

    pub(crate) fn check_same_shape(&self, other: &Matrix) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::dims(
                format!("{}x{}", self.rows(), self.cols()),
                format!("{}x{}", other.rows(), other.cols()),
            ));
        }
        Ok(())
    }

    pub fn svd(&self) -> Result<SvdResult> {
        svd(self)
    }

    pub fn nuclear_norm(&self) -> Result<f64> {
        nuclear_norm(self)
    }

    pub fn frobenius(&self) -> f64 {
        frobenius(self)
    }

    pub fn elementwise_l1(&self) -> f64 {
        elementwise_l1(self)
    }

    /// Count of singular values above `rel_tol · σ₁`.
    pub fn numerical_rank(&self, rel_tol: f64) -> Result<usize> {
        let s = self.svd()?;
        let top = s.singular_values.first().copied().unwrap_or(0.0);
        if top == 0.0 {
            return Ok(0);
        }
        Ok(s.singular_values.iter().filter(|&&v| v > rel_tol * top).count())
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            let row: Vec<String> = (0..self.cols()).map(|j| format!("{}", self.inner[(i, j)])).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.inner[idx]
    }
}

impl Add for &Matrix {
    type Output = Matrix;

    /// Panics on shape mismatch, like `nalgebra`.
    fn add(self, rhs: &Matrix) -> Matrix {
        Matrix::wrap(&self.inner + &rhs.inner)
    }
}

impl Sub for &Matrix {
    type Output = Matrix;

    fn sub(self, rhs: &Matrix) -> Matrix {
        Matrix::wrap(&self.inner - &rhs.inner)
    }
}

impl Mul<f64> for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: f64) -> Matrix {
        Matrix::wrap(&self.inner * rhs)
    }
}

/// Set of observed entries `Ω` of an `rows × cols` matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Mask {
    rows: usize,
    cols: usize,
    // row-major membership bitmap
    observed: Vec<bool>,
    count: usize,
}

impl Mask {
    pub fn full(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            observed: vec![true; rows * cols],
            count: rows * cols,
        }
    }

    pub fn empty(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            observed: vec![false; rows * cols],
            count: 0,
        }
    }

    /// Builds a mask from explicit index pairs. Out-of-range or repeated
    /// pairs are rejected.
    pub fn from_pairs(rows: usize, cols: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut mask = Self::empty(rows, cols);
        for &(i, j) in pairs {
            if i >= rows || j >= cols {
                return Err(Error::InvalidArgument(format!(
                    "mask index ({i}, {j}) outside {rows}x{cols}"
                )));
            }
            let k = i * cols + j;
            if mask.observed[k] {
                return Err(Error::InvalidArgument(format!("duplicate mask index ({i}, {j})")));
            }
            mask.observed[k] = true;
            mask.count += 1;
        }
        Ok(mask)
    }

    /// Builds a mask from a row-major membership vector.
    pub fn from_bitmap(rows: usize, cols: usize, observed: Vec<bool>) -> Result<Self> {
        if observed.len() != rows * cols {
            return Err(Error::dims(rows * cols, observed.len()));
        }
        let count = observed.iter().filter(|&&b| b).count();
        Ok(Self {
            rows,
            cols,
            observed,
            count,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        row < self.rows && col < self.cols && self.observed[row * self.cols + col]
    }

    /// Number of observed entries.
    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn is_full(&self) -> bool {
        self.count == self.rows * self.cols
    }

    /// Observed pairs in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let cols = self.cols;
        self.observed
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(k, _)| (k / cols, k % cols))
    }

    pub fn bitmap(&self) -> &[bool] {
        &self.observed
    }

    pub fn complement(&self) -> Mask {
        let observed: Vec<bool> = self.observed.iter().map(|b| !b).collect();
        Mask {
            rows: self.rows,
            cols: self.cols,
            count: self.rows * self.cols - self.count,
            observed,
        }
    }

    pub(crate) fn check_matches(&self, m: &Matrix) -> Result<()> {
        if self.shape() != m.shape() {
            return Err(Error::dims(
                format!("mask {}x{}", self.rows, self.cols),
                format!("matrix {}x{}", m.rows(), m.cols()),
            ));
        }
        Ok(())
    }
}

impl fmt::Debug for Mask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mask {}x{} ({} observed)", self.rows, self.cols, self.count)
    }
}

/// Thin SVD `m = U · diag(σ) · Vᵀ` with `r = min(M, N)`.
#[derive(Clone, Debug)]
pub struct SvdResult {
    /// `U`, M × r with orthonormal columns.
    pub left_vectors: Matrix,
    /// σ, nonnegative and nonincreasing.
    pub singular_values: Vec<f64>,
    /// `V`, N × r with orthonormal columns.
    pub right_vectors: Matrix,
}

impl SvdResult {
    /// `U · diag(f(σ)) · Vᵀ`.
    pub fn recompose_with(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let u = self.left_vectors.as_dmatrix();
        let v = self.right_vectors.as_dmatrix();
        let mut scaled = u.clone();
        for (k, &s) in self.singular_values.iter().enumerate() {
            let w = f(s);
            scaled.column_mut(k).scale_mut(w);
        }
        Matrix::wrap(scaled * v.transpose())
    }

    pub fn recompose(&self) -> Matrix {
        self.recompose_with(|s| s)
    }
}

pub fn svd(m: &Matrix) -> Result<SvdResult> {
    let (rows, cols) = m.shape();
    let a = faer::Mat::<f64>::from_fn(rows, cols, |i, j| m.inner[(i, j)]);
    let decomposed = a.thin_svd().map_err(|_| Error::Decomposition {
        residual: frobenius(m),
    })?;
    let (u, v) = (decomposed.U(), decomposed.V());
    let sigma = decomposed.S().column_vector();
    let r = rows.min(cols);
    Ok(SvdResult {
        left_vectors: Matrix::wrap(DMatrix::from_fn(rows, r, |i, k| u[(i, k)])),
        singular_values: (0..r).map(|k| sigma[k].max(0.0)).collect(),
        right_vectors: Matrix::wrap(DMatrix::from_fn(cols, r, |j, k| v[(j, k)])),
    })
}

/// Sum of singular values.
pub fn nuclear_norm(m: &Matrix) -> Result<f64> {
    Ok(svd(m)?.singular_values.iter().sum())
}

/// Sum of absolute entries (the convex ℓ1 surrogate for sparsity).
pub fn elementwise_l1(m: &Matrix) -> f64 {
    m.inner.iter().map(|v| v.abs()).sum()
}

pub fn frobenius(m: &Matrix) -> f64 {
    m.inner.norm()
}

#[inline]
pub fn soft_threshold(x: f64, tau: f64) -> f64 {
    if x > tau {
        x - tau
    } else if x < -tau {
        x + tau
    } else {
        0.0
    }
}

/// Entrywise soft thresholding `sign(x)·max(|x| − τ, 0)`.
pub fn shrink(m: &Matrix, tau: f64) -> Result<Matrix> {
    check_tau(tau)?;
    Ok(Matrix::wrap(m.inner.map(|x| soft_threshold(x, tau))))
}

/// Singular value thresholding: proximal map of `τ‖·‖_*`.
pub fn svt(m: &Matrix, tau: f64) -> Result<Matrix> {
    check_tau(tau)?;
    if tau == 0.0 {
        return Ok(m.clone());
    }
    let s = svd(m)?;
    Ok(s.recompose_with(|sigma| (sigma - tau).max(0.0)))
}

/// Orthogonal projection onto matrices supported on `Ω`.
pub fn project_mask(m: &Matrix, omega: &Mask) -> Result<Matrix> {
    omega.check_matches(m)?;
    let mut out = m.inner.clone();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if !omega.contains(i, j) {
                out[(i, j)] = 0.0;
            }
        }
    }
    Ok(Matrix::wrap(out))
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::InvalidArgument(format!("threshold must be finite and nonnegative, got {tau}")));
    }
    Ok(())
}
