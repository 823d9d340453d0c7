use alloc::vec;

use super::{uniform_matrix, uniform_vec};
use crate::linalg::SymMatrix;
use crate::model::{spectral_dc_split, ConvexQuadratic, ConvexSetOmega, DCPair, DCProgram};
use crate::rng::SplitMix64;

/// Right-hand side of the quadratic constraint.
pub const NCVQCQP_ALPHA: f64 = 10.0;

/// Random nonconvex QCQP
///
/// ```text
/// min  ½xᵀQx + qᵀx
/// s.t. ½xᵀPx + pᵀx − α ≤ 0,  Ax ≤ b,  −5 ≤ x ≤ 10
/// ```
///
/// with `Q = MᵀM + ½I`, `P = ½(P_r + P_rᵀ)`, and every entry of `M, q, P_r,
/// p, A, b` uniform on `[−10, 10)`, drawn in that order (row-major). The
/// constraint is split spectrally: `u = ½xᵀP₁x + pᵀx − α`, `v = ½xᵀP₂x`.
pub fn gen_random_ncvqcqp(n: usize, m2: usize, seed: u64) -> DCProgram {
    let mut rng = SplitMix64::new(seed);
    let m = uniform_matrix(&mut rng, n, n, -10.0, 10.0);
    let q = uniform_vec(&mut rng, n, -10.0, 10.0);
    let pr = uniform_matrix(&mut rng, n, n, -10.0, 10.0);
    let p = uniform_vec(&mut rng, n, -10.0, 10.0);
    let a = uniform_matrix(&mut rng, m2, n, -10.0, 10.0);
    let b = uniform_vec(&mut rng, m2, -10.0, 10.0);

    let mtm = m.transpose().mul(&m);
    let hess = SymMatrix::symmetrize(&mtm).expect("square").add_diag(0.5);
    let objective = DCPair::convex(ConvexQuadratic::new(hess, q, 0.0).expect("finite data"));

    let psym = SymMatrix::symmetrize(&pr).expect("square");
    let (p1, p2) = spectral_dc_split(&psym).expect("finite data");
    let u = ConvexQuadratic::new(p1, p, -NCVQCQP_ALPHA).expect("finite data");
    let v = ConvexQuadratic::new(p2, vec![0.0; n], 0.0).expect("finite data");
    let g = DCPair::new(u, v).expect("same dimension");

    let omega = ConvexSetOmega::boxed(vec![-5.0; n], vec![10.0; n]).with_inequalities(a, b);
    DCProgram::new(objective, vec![g], omega)
}
