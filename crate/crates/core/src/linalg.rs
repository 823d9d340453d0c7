//! Small dense linear algebra: a row-major matrix, a packed symmetric matrix
//! and a Cholesky factorization.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::math;
use crate::{Error, Result};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from row slices. Every row must have length `cols`;
    /// `cols` is needed separately so that a matrix with zero rows still has a
    /// width.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R], cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    what: "matrix row",
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                what: "matrix data",
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
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
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// `A x`
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| math::dot(self.row(i), x)).collect()
    }

    /// `Aᵀ y`
    pub fn tr_mul_vec(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &yi) in y.iter().enumerate() {
            if yi != 0.0 {
                for (o, a) in out.iter_mut().zip(self.row(i)) {
                    *o += yi * a;
                }
            }
        }
        out
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let src = other.row(k);
                for (o, b) in out.row_mut(i).iter_mut().zip(src) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn max_abs(&self) -> f64 {
        math::norm_inf(&self.data)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Stacks `self` on top of `other` (same column count).
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Copy with `extra` zero columns appended on the right.
    pub fn pad_cols(&self, extra: usize) -> Matrix {
        let mut out = Matrix::zeros(self.rows, self.cols + extra);
        for i in 0..self.rows {
            out.row_mut(i)[..self.cols].copy_from_slice(self.row(i));
        }
        out
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Symmetric matrix stored as its packed lower triangle, so `S[(i, j)]` and
/// `S[(j, i)]` are the same storage cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    lower: Vec<f64>,
}

#[inline]
fn packed(i: usize, j: usize) -> usize {
    let (r, c) = if i >= j { (i, j) } else { (j, i) };
    r * (r + 1) / 2 + c
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        SymMatrix {
            dim,
            lower: vec![0.0; dim * (dim + 1) / 2],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaled_identity(dim, 1.0)
    }

    pub fn scaled_identity(dim: usize, alpha: f64) -> Self {
        let mut s = SymMatrix::zeros(dim);
        for i in 0..dim {
            s.set(i, i, alpha);
        }
        s
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut s = SymMatrix::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            s.set(i, i, d);
        }
        s
    }

    /// Takes the lower triangle of a square matrix. Fails if the matrix is
    /// not square or if a mirrored pair differs by more than
    /// `1e-12 * (1 + max|a_ij|)`.
    pub fn from_dense(m: &Matrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::DimensionMismatch {
                what: "square matrix",
                expected: m.rows(),
                found: m.cols(),
            });
        }
        let tol = 1e-12 * (1.0 + m.max_abs());
        let n = m.rows();
        let mut s = SymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                if (m[(i, j)] - m[(j, i)]).abs() > tol {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
                s.set(i, j, m[(i, j)]);
            }
        }
        Ok(s)
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        Self::from_dense(&Matrix::from_rows(rows, rows.len())?)
    }

    /// `½ (M + Mᵀ)`
    pub fn symmetrize(m: &Matrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::DimensionMismatch {
                what: "square matrix",
                expected: m.rows(),
                found: m.cols(),
            });
        }
        let n = m.rows();
        let mut s = SymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                s.set(i, j, 0.5 * (m[(i, j)] + m[(j, i)]));
            }
        }
        Ok(s)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.lower[packed(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.lower[packed(i, j)] = v;
    }

    #[inline]
    pub fn add_at(&mut self, i: usize, j: usize, v: f64) {
        self.lower[packed(i, j)] += v;
    }

    pub fn to_dense(&self) -> Matrix {
        let n = self.dim;
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.get(i, j);
            }
        }
        m
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.to_dense().to_rows()
    }

    pub fn is_zero(&self) -> bool {
        self.lower.iter().all(|&x| x == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.lower.iter().all(|x| x.is_finite())
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        math::norm_inf(&self.lower)
    }

    pub fn frobenius(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..=i {
                let v = self.get(i, j);
                s += if i == j { v * v } else { 2.0 * v * v };
            }
        }
        math::sqrt(s)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.dim);
        let n = self.dim;
        let mut out = vec![0.0; n];
        for i in 0..n {
            let base = i * (i + 1) / 2;
            let mut acc = 0.0;
            for j in 0..i {
                let a = self.lower[base + j];
                acc += a * x[j];
                out[j] += a * x[i];
            }
            acc += self.lower[base + i] * x[i];
            out[i] += acc;
        }
        out
    }

    /// `xᵀ S x`
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        math::dot(x, &self.mul_vec(x))
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        debug_assert_eq!(self.dim, other.dim);
        SymMatrix {
            dim: self.dim,
            lower: self
                .lower
                .iter()
                .zip(&other.lower)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        debug_assert_eq!(self.dim, other.dim);
        SymMatrix {
            dim: self.dim,
            lower: self
                .lower
                .iter()
                .zip(&other.lower)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, alpha: f64) -> SymMatrix {
        SymMatrix {
            dim: self.dim,
            lower: self.lower.iter().map(|a| alpha * a).collect(),
        }
    }

    pub fn add_diag(&self, alpha: f64) -> SymMatrix {
        let mut out = self.clone();
        for i in 0..self.dim {
            out.add_at(i, i, alpha);
        }
        out
    }

    /// Embeds `self` into a larger zero matrix of size `new_dim`, placing it
    /// at rows/cols `offset..offset + dim`.
    pub fn embed(&self, new_dim: usize, offset: usize) -> SymMatrix {
        debug_assert!(offset + self.dim <= new_dim);
        let mut out = SymMatrix::zeros(new_dim);
        for i in 0..self.dim {
            for j in 0..=i {
                out.set(offset + i, offset + j, self.get(i, j));
            }
        }
        out
    }

    /// `Bᵀ S B` for a dense `B` with `dim` rows.
    pub fn congruence(&self, b: &Matrix) -> SymMatrix {
        debug_assert_eq!(b.rows(), self.dim);
        let sb = self.to_dense().mul(b);
        let k = b.cols();
        let mut out = SymMatrix::zeros(k);
        for i in 0..k {
            for j in 0..=i {
                let mut acc = 0.0;
                for r in 0..self.dim {
                    acc += b[(r, i)] * sb[(r, j)];
                }
                out.set(i, j, acc);
            }
        }
        out
    }
}

/// Lower-triangular Cholesky factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: Matrix,
}

impl Cholesky {
    /// Factorizes a dense symmetric matrix (only the lower triangle is
    /// read). Returns `None` if a pivot is not strictly positive.
    pub fn factor(a: &Matrix) -> Option<Self> {
        let n = a.rows();
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > 0.0) || !d.is_finite() {
                return None;
            }
            let djj = math::sqrt(d);
            l[(j, j)] = djj;
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / djj;
            }
        }
        Some(Cholesky { l })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.l.rows();
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[(i, k)] * y[k];
            }
            y[i] = s / self.l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self.l[(k, i)] * y[k];
            }
            y[i] = s / self.l[(i, i)];
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_storage_is_structurally_symmetric() {
        let mut s = SymMatrix::zeros(3);
        s.set(0, 2, 5.0);
        assert_eq!(s.get(2, 0), 5.0);
        s.add_at(2, 0, 1.0);
        assert_eq!(s.get(0, 2), 6.0);
    }

    #[test]
    fn from_dense_rejects_asymmetric_input() {
        let m = Matrix::from_rows(&[[1.0, 2.0], [2.5, 1.0]], 2).unwrap();
        assert!(matches!(
            SymMatrix::from_dense(&m),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn sym_mul_vec_matches_dense() {
        let s =
            SymMatrix::from_rows(&[[2.0, 1.0, 0.5], [1.0, 3.0, -1.0], [0.5, -1.0, 4.0]]).unwrap();
        let x = [1.0, -2.0, 0.25];
        let dense = s.to_dense().mul_vec(&x);
        let packed = s.mul_vec(&x);
        for (a, b) in dense.iter().zip(&packed) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn cholesky_solves_spd_system() {
        let a = Matrix::from_rows(&[[4.0, 2.0], [2.0, 3.0]], 2).unwrap();
        let ch = Cholesky::factor(&a).unwrap();
        let x = ch.solve(&[2.0, 1.0]);
        let r = a.mul_vec(&x);
        assert!((r[0] - 2.0).abs() < 1e-14 && (r[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]], 2).unwrap();
        assert!(Cholesky::factor(&a).is_none());
    }

    #[test]
    fn congruence_matches_explicit_product() {
        let s = SymMatrix::from_rows(&[[2.0, 1.0], [1.0, 3.0]]).unwrap();
        let b = Matrix::from_rows(&[[1.0, 0.0, 2.0], [0.5, -1.0, 1.0]], 3).unwrap();
        let c = s.congruence(&b);
        let expect = b.transpose().mul(&s.to_dense()).mul(&b);
        for i in 0..3 {
            for j in 0..3 {
                assert!((c.get(i, j) - expect[(i, j)]).abs() < 1e-13);
            }
        }
    }
}
