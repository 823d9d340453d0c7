//! Cyclic Jacobi eigensolver for symmetric matrices.

use alloc::vec::Vec;

use crate::linalg::{Matrix, SymMatrix};
use crate::math;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct JacobiOptions {
    /// Stop when the off-diagonal Frobenius norm falls to
    /// `rel_tol * ‖A‖_F`.
    pub rel_tol: f64,
    pub max_sweeps: usize,
}

impl Default for JacobiOptions {
    fn default() -> Self {
        JacobiOptions {
            rel_tol: 1e-12,
            max_sweeps: 100,
        }
    }
}

/// `A = V diag(values) Vᵀ` with eigenvalues sorted ascending and eigenvectors
/// stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
    pub sweeps: usize,
}

impl SymmetricEigen {
    pub fn new(a: &SymMatrix) -> Result<Self> {
        jacobi_eigen(a, JacobiOptions::default())
    }

    pub fn min_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// `V diag(f(σ)) Vᵀ`
    pub fn reassemble(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let n = self.values.len();
        let weights: Vec<f64> = self.values.iter().map(|&s| f(s)).collect();
        let mut out = SymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let mut acc = 0.0;
                for (k, w) in weights.iter().enumerate() {
                    if *w != 0.0 {
                        acc += w * self.vectors[(i, k)] * self.vectors[(j, k)];
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }
}

pub fn jacobi_eigen(a: &SymMatrix, opts: JacobiOptions) -> Result<SymmetricEigen> {
    if !a.is_finite() {
        return Err(Error::NonFinite("eigensolver input"));
    }
    let n = a.dim();
    let mut m = a.to_dense();
    let mut v = Matrix::identity(n);
    let target = opts.rel_tol * a.frobenius();

    let off_norm = |m: &Matrix| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..i {
                s += 2.0 * m[(i, j)] * m[(i, j)];
            }
        }
        math::sqrt(s)
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&m);
        if off <= target {
            break;
        }
        if sweeps == opts.max_sweeps {
            return Err(Error::EigenNotConverged {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + math::hypot(theta, 1.0))
                } else {
                    -1.0 / (-theta + math::hypot(theta, 1.0))
                };
                let c = 1.0 / math::hypot(t, 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = c * akp - s * akq;
                    m[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = c * apk - s * aqk;
                    m[(q, k)] = s * apk + c * aqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, col)] = v[(r, src)];
        }
    }
    Ok(SymmetricEigen {
        values,
        vectors,
        sweeps,
    })
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(a: &SymMatrix) -> Result<f64> {
    if a.dim() == 0 {
        return Ok(0.0);
    }
    Ok(SymmetricEigen::new(a)?.min_value())
}
