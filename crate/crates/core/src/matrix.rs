//! Dense real matrices and the symmetric / PSD refinements every order is
//! defined on.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Deref, Index, IndexMut};

use crate::error::{Error, Result};
use crate::numkernel;
use crate::tol::ToleranceConfig;

/// Dense row-major `rows x cols` real matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row slices. Fails on ragged input.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: (1, cols),
                    found: (1, r.len()),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: (rows, cols),
                found: (data.len(), 1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Column matrix `[x]`.
    pub fn column_vector(x: &[f64]) -> Self {
        Self {
            rows: x.len(),
            cols: 1,
            data: x.to_vec(),
        }
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                expected: (self.rows, other.cols),
                found: other.shape(),
            });
        }
        Ok(Matrix::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)]
            } else {
                other[(i, j - self.cols)]
            }
        }))
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
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[f64]) {
        for (i, &x) in v.iter().enumerate() {
            self[(i, j)] = x;
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: (self.cols, rhs.cols),
                found: rhs.shape(),
            });
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// `self * rhs` for shapes already known to agree.
    pub(crate) fn mul(&self, rhs: &Matrix) -> Matrix {
        self.matmul(rhs).expect("inner dimensions agree")
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: (self.cols, 1),
                found: (x.len(), 1),
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    fn zip_with(&self, rhs: &Matrix, f: impl Fn(f64, f64) -> f64) -> Result<Matrix> {
        if self.shape() != rhs.shape() {
            return Err(Error::DimensionMismatch {
                expected: self.shape(),
                found: rhs.shape(),
            });
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, rhs: &Matrix) -> Result<Matrix> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Matrix) -> Result<Matrix> {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// Largest absolute entry (0 for an empty matrix).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|v| v * v).sum())
    }

    /// `max |self - rhs|`; panics on shape mismatch.
    pub fn max_abs_diff(&self, rhs: &Matrix) -> f64 {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch");
        self.data
            .iter()
            .zip(&rhs.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows.min(self.cols) {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    /// `self * m * selfᵗ`.
    pub fn congruence(&self, m: &Matrix) -> Result<Matrix> {
        self.matmul(m)?.matmul(&self.transpose())
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.data.iter().position(|v| !v.is_finite()) {
            Some(p) => Err(Error::NonFinite {
                row: p / self.cols.max(1),
                col: p % self.cols.max(1),
            }),
            None => Ok(()),
        }
    }

    /// Leading `r x c` block.
    pub fn block(&self, r0: usize, c0: usize, r: usize, c: usize) -> Matrix {
        Matrix::from_fn(r, c, |i, j| self[(r0 + i, c0 + j)])
    }
}

/// Dense real symmetric matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct SymMatrix(Matrix);

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sym")?;
        self.0.fmt(f)
    }
}

impl Deref for SymMatrix {
    type Target = Matrix;

    fn deref(&self) -> &Matrix {
        &self.0
    }
}

impl SymMatrix {
    /// Symmetrizes `m` by averaging with its transpose. Returns the matrix and
    /// the asymmetry that was removed; fails for non-square, empty or
    /// non-finite input but never on asymmetry.
    pub fn symmetrized(m: Matrix) -> Result<(SymMatrix, f64)> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows,
                cols: m.cols,
            });
        }
        if m.rows == 0 {
            return Err(Error::Empty);
        }
        m.check_finite()?;
        let asym = m.asymmetry();
        let n = m.rows;
        let s = Matrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
        Ok((SymMatrix(s), asym))
    }

    /// Accepts `m` when its asymmetry is within `sym_tol * max(1, ‖m‖_max)`,
    /// symmetrizing away the residual.
    pub fn new(m: Matrix, tol: &ToleranceConfig) -> Result<SymMatrix> {
        let scale = m.max_abs().max(1.0);
        let (s, asym) = Self::symmetrized(m)?;
        if asym > tol.sym_tol * scale {
            return Err(Error::NotSymmetric { asymmetry: asym });
        }
        Ok(s)
    }

    /// Row-slice constructor with default tolerances.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<SymMatrix> {
        Self::new(Matrix::from_rows(rows)?, &ToleranceConfig::default())
    }

    /// Symmetrizes without any tolerance check; used for products that are
    /// symmetric up to rounding, such as `S A Sᵗ`.
    pub(crate) fn from_product(m: Matrix) -> SymMatrix {
        Self::symmetrized(m)
            .expect("square finite product")
            .0
    }

    pub fn zeros(n: usize) -> SymMatrix {
        SymMatrix(Matrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> SymMatrix {
        SymMatrix(Matrix::identity(n))
    }

    pub fn diag(d: &[f64]) -> SymMatrix {
        SymMatrix(Matrix::from_diag(d))
    }

    /// `x xᵗ`.
    pub fn outer(x: &[f64]) -> SymMatrix {
        SymMatrix(Matrix::from_fn(x.len(), x.len(), |i, j| x[i] * x[j]))
    }

    /// `g gᵗ` for any `n x k` matrix `g`; always PSD in exact arithmetic.
    pub fn gram(g: &Matrix) -> SymMatrix {
        Self::from_product(g.mul(&g.transpose()))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn add(&self, rhs: &SymMatrix) -> Result<SymMatrix> {
        Ok(SymMatrix(self.0.add(&rhs.0)?))
    }

    pub fn sub(&self, rhs: &SymMatrix) -> Result<SymMatrix> {
        Ok(SymMatrix(self.0.sub(&rhs.0)?))
    }

    pub fn scale(&self, s: f64) -> SymMatrix {
        SymMatrix(self.0.scale(s))
    }

    /// `s * self * sᵗ` for a square `s` of matching size.
    pub fn congruence_by(&self, s: &Matrix) -> Result<SymMatrix> {
        Ok(Self::from_product(s.congruence(&self.0)?))
    }

    pub fn quad_form(&self, x: &[f64]) -> f64 {
        let ax = self.0.mul_vec(x).expect("vector length matches");
        ax.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub(crate) fn check_same_dim(&self, other: &SymMatrix) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.shape(),
                found: other.shape(),
            });
        }
        Ok(())
    }
}

/// A symmetric matrix certified positive semidefinite: its smallest computed
/// eigenvalue is `>= -psd_tol * scale`.
#[derive(Clone, PartialEq)]
pub struct PsdMatrix {
    base: SymMatrix,
    min_eig_witness: f64,
}

impl fmt::Debug for PsdMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Psd(min_eig={:e}) ", self.min_eig_witness)?;
        self.base.0.fmt(f)
    }
}

impl Deref for PsdMatrix {
    type Target = SymMatrix;

    fn deref(&self) -> &SymMatrix {
        &self.base
    }
}

impl PsdMatrix {
    pub fn certify(a: SymMatrix, tol: &ToleranceConfig) -> Result<PsdMatrix> {
        let check = numkernel::is_psd(&a, tol)?;
        if !check.is_psd {
            return Err(Error::NotPsd {
                min_eig: check.min_eig,
            });
        }
        Ok(PsdMatrix {
            base: a,
            min_eig_witness: check.min_eig,
        })
    }

    /// Wraps a matrix that is PSD by construction (a Gram matrix, a spectral
    /// part). The witness is recorded as 0.
    pub(crate) fn assume_psd(a: SymMatrix) -> PsdMatrix {
        PsdMatrix {
            base: a,
            min_eig_witness: 0.0,
        }
    }

    pub fn zeros(n: usize) -> PsdMatrix {
        Self::assume_psd(SymMatrix::zeros(n))
    }

    pub fn identity(n: usize) -> PsdMatrix {
        PsdMatrix {
            base: SymMatrix::identity(n),
            min_eig_witness: 1.0,
        }
    }

    /// `g gᵗ`, PSD by construction.
    pub fn gram(g: &Matrix) -> PsdMatrix {
        Self::assume_psd(SymMatrix::gram(g))
    }

    pub fn min_eig_witness(&self) -> f64 {
        self.min_eig_witness
    }

    pub fn as_sym(&self) -> &SymMatrix {
        &self.base
    }

    pub fn into_sym(self) -> SymMatrix {
        self.base
    }
}
