//! Elimination of equality rows: `z = z₀ + B y` with `B` an orthonormal
//! basis of `null(E)`, and conversion of every inequality into either a
//! quadratic row or a sparse linear row over `y`.

use alloc::vec;
use alloc::vec::Vec;

use super::ConvexSubproblem;
use crate::eigen::SymmetricEigen;
use crate::linalg::{Matrix, SymMatrix};
use crate::math;
use crate::model::ConvexQuadratic;
use crate::Result;

/// Where a reduced linear row came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(super) enum RowOrigin {
    Ineq(usize),
    Lower(usize),
    Upper(usize),
    /// Phase-1 lower bound on the auxiliary variable.
    Aux,
}

/// Sparse row `aᵀ y ≤ rhs`.
#[derive(Debug, Clone)]
pub(super) struct SparseRow {
    pub idx: Vec<usize>,
    pub val: Vec<f64>,
    pub rhs: f64,
    pub origin: RowOrigin,
}

impl SparseRow {
    #[inline]
    pub fn dot(&self, y: &[f64]) -> f64 {
        self.idx.iter().zip(&self.val).map(|(&i, v)| v * y[i]).sum()
    }
}

/// Quadratic over `y` with a flag for the affine case.
#[derive(Debug, Clone)]
pub(super) struct Quad {
    pub h: SymMatrix,
    pub q: Vec<f64>,
    pub r: f64,
    pub affine: bool,
}

impl Quad {
    fn from_convex(c: &ConvexQuadratic) -> Self {
        Quad {
            affine: c.hessian.is_zero(),
            h: c.hessian.clone(),
            q: c.linear.clone(),
            r: c.constant,
        }
    }

    #[inline]
    pub fn value(&self, y: &[f64]) -> f64 {
        let lin = math::dot(&self.q, y) + self.r;
        if self.affine {
            lin
        } else {
            0.5 * self.h.quad_form(y) + lin
        }
    }

    pub fn gradient(&self, y: &[f64]) -> Vec<f64> {
        if self.affine {
            return self.q.clone();
        }
        let mut g = self.h.mul_vec(y);
        for (gi, qi) in g.iter_mut().zip(&self.q) {
            *gi += qi;
        }
        g
    }

    /// `dᵀ H d`
    pub fn curvature(&self, d: &[f64]) -> f64 {
        if self.affine {
            0.0
        } else {
            self.h.quad_form(d)
        }
    }

    /// Adds a trailing coordinate with coefficient `coef` in the linear part.
    pub fn with_aux(&self, coef: f64) -> Quad {
        let n = self.q.len();
        let mut q = self.q.clone();
        q.push(coef);
        Quad {
            h: self.h.embed(n + 1, 0),
            q,
            r: self.r,
            affine: self.affine,
        }
    }
}

/// `z = z₀ + B y`; `basis = None` means `B = I` and `z₀ = 0`.
#[derive(Debug, Clone)]
pub(super) struct AffineMap {
    pub z0: Vec<f64>,
    pub basis: Option<Matrix>,
    /// Equality rows (user rows followed by fixed box coordinates) and the
    /// data needed for their least-squares multipliers.
    pub eq: Option<EqualityData>,
}

#[derive(Debug, Clone)]
pub(super) struct EqualityData {
    pub e: Matrix,
    /// Fixed coordinate index for rows past the user's `E`.
    pub fixed: Vec<usize>,
    /// Eigenvectors of `EᵀE` spanning its range, as columns.
    pub range: Matrix,
    pub range_values: Vec<f64>,
}

impl AffineMap {
    pub fn lift(&self, y: &[f64]) -> Vec<f64> {
        match &self.basis {
            None => y.to_vec(),
            Some(b) => {
                let mut z = b.mul_vec(y);
                for (zi, z0) in z.iter_mut().zip(&self.z0) {
                    *zi += z0;
                }
                z
            }
        }
    }

    /// Orthogonal projection of `z` onto the reduced coordinates.
    pub fn project(&self, z: &[f64]) -> Vec<f64> {
        match &self.basis {
            None => z.to_vec(),
            Some(b) => {
                let diff: Vec<f64> = z.iter().zip(&self.z0).map(|(a, b)| a - b).collect();
                b.tr_mul_vec(&diff)
            }
        }
    }

    /// Least-squares multipliers `η` for `r + Eᵀη = 0`.
    pub fn equality_multipliers(&self, r: &[f64]) -> Vec<f64> {
        let Some(eq) = &self.eq else {
            return Vec::new();
        };
        let mut w = eq.range.tr_mul_vec(r);
        for (wi, s) in w.iter_mut().zip(&eq.range_values) {
            *wi /= s;
        }
        let u = eq.range.mul_vec(&w);
        eq.e.mul_vec(&u).into_iter().map(|x| -x).collect()
    }
}

/// Inequality-only problem over `y`.
#[derive(Debug, Clone)]
pub(super) struct Reduced {
    pub n: usize,
    pub obj: Quad,
    pub qcs: Vec<Quad>,
    pub rows: Vec<SparseRow>,
    pub map: AffineMap,
}

#[allow(clippy::large_enum_variant)]
pub(super) enum Reduction {
    Ready(Reduced),
    /// `E z = d` has no solution; payload is the least-squares residual.
    Inconsistent(f64),
}

const RANK_TOL: f64 = 1e-12;

/// Builds the reduced problem. `anchor` selects the particular solution
/// `z₀` (its projection onto `{E z = d}`).
pub(super) fn reduce(sp: &ConvexSubproblem, anchor: &[f64], tol: f64) -> Result<Reduction> {
    let n = sp.dim_total;
    let fixed: Vec<usize> = (0..n).filter(|&i| sp.lb[i] == sp.ub[i]).collect();
    let p_user = sp.lin_eq.len();

    if p_user == 0 && fixed.is_empty() {
        let mut rows = Vec::new();
        for (j, b) in sp.lin_ineq.b.iter().enumerate() {
            let a = sp.lin_ineq.a.row(j);
            let (idx, val): (Vec<usize>, Vec<f64>) = a
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, v)| (i, *v))
                .unzip();
            if idx.is_empty() {
                if *b < -tol {
                    return Ok(Reduction::Inconsistent(-b));
                }
                continue;
            }
            rows.push(SparseRow {
                idx,
                val,
                rhs: *b,
                origin: RowOrigin::Ineq(j),
            });
        }
        for i in 0..n {
            if sp.lb[i].is_finite() {
                rows.push(SparseRow {
                    idx: vec![i],
                    val: vec![-1.0],
                    rhs: -sp.lb[i],
                    origin: RowOrigin::Lower(i),
                });
            }
            if sp.ub[i].is_finite() {
                rows.push(SparseRow {
                    idx: vec![i],
                    val: vec![1.0],
                    rhs: sp.ub[i],
                    origin: RowOrigin::Upper(i),
                });
            }
        }
        return Ok(Reduction::Ready(Reduced {
            n,
            obj: Quad::from_convex(&sp.objective),
            qcs: sp.qcs.iter().map(Quad::from_convex).collect(),
            rows,
            map: AffineMap {
                z0: vec![0.0; n],
                basis: None,
                eq: None,
            },
        }));
    }

    // Stack user equalities and fixed coordinates.
    let mut e = Matrix::zeros(p_user + fixed.len(), n);
    let mut d = Vec::with_capacity(p_user + fixed.len());
    for j in 0..p_user {
        e.row_mut(j).copy_from_slice(sp.lin_eq.a.row(j));
        d.push(sp.lin_eq.b[j]);
    }
    for (k, &i) in fixed.iter().enumerate() {
        e[(p_user + k, i)] = 1.0;
        d.push(sp.lb[i]);
    }

    let ete = {
        let mut s = SymMatrix::zeros(n);
        for r in 0..e.rows() {
            let row = e.row(r);
            for i in 0..n {
                if row[i] == 0.0 {
                    continue;
                }
                for j in 0..=i {
                    s.add_at(i, j, row[i] * row[j]);
                }
            }
        }
        s
    };
    let eig = SymmetricEigen::new(&ete)?;
    let top = eig.values.iter().fold(0.0f64, |m, v| m.max(*v));
    let cutoff = RANK_TOL * top.max(1e-300);
    let null_cols: Vec<usize> = (0..n).filter(|&k| eig.values[k] <= cutoff).collect();
    let range_cols: Vec<usize> = (0..n).filter(|&k| eig.values[k] > cutoff).collect();
    let take = |cols: &[usize]| {
        let mut m = Matrix::zeros(n, cols.len());
        for (c, &k) in cols.iter().enumerate() {
            for r in 0..n {
                m[(r, c)] = eig.vectors[(r, k)];
            }
        }
        m
    };
    let basis = take(&null_cols);
    let range = take(&range_cols);
    let range_values: Vec<f64> = range_cols.iter().map(|&k| eig.values[k]).collect();

    // z₀ = anchor − E⁺ (E anchor − d), E⁺ = V_R Σ⁻² V_Rᵀ Eᵀ
    let resid: Vec<f64> = e
        .mul_vec(anchor)
        .iter()
        .zip(&d)
        .map(|(a, b)| a - b)
        .collect();
    let mut w = range.tr_mul_vec(&e.tr_mul_vec(&resid));
    for (wi, s) in w.iter_mut().zip(&range_values) {
        *wi /= s;
    }
    let corr = range.mul_vec(&w);
    let z0: Vec<f64> = anchor.iter().zip(&corr).map(|(a, c)| a - c).collect();
    let check: f64 = e
        .mul_vec(&z0)
        .iter()
        .zip(&d)
        .fold(0.0, |m, (a, b)| m.max((a - b).abs()));
    let scale = 1.0 + math::norm_inf(&d) + e.max_abs() * math::norm_inf(&z0);
    if check > tol.max(1e-12 * scale) {
        return Ok(Reduction::Inconsistent(check));
    }

    let k = basis.cols();
    let transform = |c: &ConvexQuadratic| -> Quad {
        let affine = c.hessian.is_zero();
        let g = c.gradient(&z0);
        Quad {
            h: if affine {
                SymMatrix::zeros(k)
            } else {
                c.hessian.congruence(&basis)
            },
            q: basis.tr_mul_vec(&g),
            r: c.value(&z0),
            affine,
        }
    };

    let mut rows = Vec::new();
    let mut push_row = |dense: Vec<f64>, rhs: f64, origin: RowOrigin, norm_src: f64| -> bool {
        let thresh = 1e-12 * (1.0 + norm_src);
        let (idx, val): (Vec<usize>, Vec<f64>) = dense
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() > thresh)
            .map(|(i, v)| (i, *v))
            .unzip();
        if idx.is_empty() {
            // constant row: 0 ≤ rhs must hold
            return rhs >= -tol;
        }
        rows.push(SparseRow {
            idx,
            val,
            rhs,
            origin,
        });
        true
    };
    for j in 0..sp.lin_ineq.len() {
        let a = sp.lin_ineq.a.row(j);
        let dense = basis.tr_mul_vec(a);
        let rhs = sp.lin_ineq.b[j] - math::dot(a, &z0);
        if !push_row(dense, rhs, RowOrigin::Ineq(j), math::norm_inf(a)) {
            return Ok(Reduction::Inconsistent(-rhs));
        }
    }
    for i in 0..n {
        if sp.lb[i] == sp.ub[i] {
            continue;
        }
        let bi: Vec<f64> = basis.row(i).to_vec();
        if sp.lb[i].is_finite() {
            let rhs = z0[i] - sp.lb[i];
            if !push_row(
                bi.iter().map(|v| -v).collect(),
                rhs,
                RowOrigin::Lower(i),
                1.0,
            ) {
                return Ok(Reduction::Inconsistent(-rhs));
            }
        }
        if sp.ub[i].is_finite() {
            let rhs = sp.ub[i] - z0[i];
            if !push_row(bi.clone(), rhs, RowOrigin::Upper(i), 1.0) {
                return Ok(Reduction::Inconsistent(-rhs));
            }
        }
    }

    Ok(Reduction::Ready(Reduced {
        n: k,
        obj: transform(&sp.objective),
        qcs: sp.qcs.iter().map(transform).collect(),
        rows,
        map: AffineMap {
            z0,
            basis: Some(basis),
            eq: Some(EqualityData {
                e,
                fixed,
                range,
                range_values,
            }),
        },
    }))
}
