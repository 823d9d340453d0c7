use alloc::vec;
use alloc::vec::Vec;

use super::{uniform_matrix, uniform_vec};
use crate::inner::ConvexSubproblem;
use crate::linalg::{Matrix, SymMatrix};
use crate::model::{ConvexQuadratic, ConvexSetOmega, DCPair, DCProgram};
use crate::rng::SplitMix64;

/// `min ½‖x − c‖²` over `[−5,5]²` subject to `2 − ½‖x‖² ≤ 0`, i.e. outside
/// the disc of radius 2, with `c = (0.5, 0.2)` inside the disc. The concave
/// part `v = ½‖x‖²` is strongly convex; the solution is `2c/‖c‖`.
pub fn build_dca_comparison() -> DCProgram {
    let c = [0.5, 0.2];
    let f = ConvexQuadratic::scaled_norm(
        2,
        1.0,
        vec![-c[0], -c[1]],
        0.5 * (c[0] * c[0] + c[1] * c[1]),
    );
    let u = ConvexQuadratic::constant(2, 2.0);
    let v = ConvexQuadratic::scaled_norm(2, 1.0, vec![0.0; 2], 0.0);
    let g = DCPair::new(u, v).expect("same dimension");
    DCProgram::new(
        DCPair::convex(f),
        vec![g],
        ConvexSetOmega::boxed(vec![-5.0; 2], vec![5.0; 2]),
    )
}

/// Random convex QCQP of dimension `n` for exercising the inner solver.
///
/// Draws an objective `MᵀM + 10⁻³I` with `M` of random rank, up to three ellipsoidal constraints
/// and up to `n/2` half-spaces that all hold strictly at the origin, a box
/// of random half-widths (some sides infinite), and, when `n ≥ 4`, possibly
/// one equality row through the origin and one fixed coordinate.
pub fn random_convex_subproblem(n: usize, seed: u64) -> ConvexSubproblem {
    let mut rng = SplitMix64::new(seed);
    let rank = 1 + rng.below(n);
    let m = uniform_matrix(&mut rng, rank, n, -1.0, 1.0);
    let hess = SymMatrix::symmetrize(&m.transpose().mul(&m))
        .expect("square")
        .add_diag(1e-3);
    let q = uniform_vec(&mut rng, n, -5.0, 5.0);
    let objective = ConvexQuadratic::new(hess, q, 0.0).expect("finite data");

    let mut lb = Vec::with_capacity(n);
    let mut ub = Vec::with_capacity(n);
    for _ in 0..n {
        let l = rng.uniform(0.5, 4.0);
        let u = rng.uniform(0.5, 4.0);
        lb.push(if rng.next_f64() < 0.15 {
            f64::NEG_INFINITY
        } else {
            -l
        });
        ub.push(if rng.next_f64() < 0.15 {
            f64::INFINITY
        } else {
            u
        });
    }
    let mut sp = ConvexSubproblem::boxed(objective, lb, ub);

    let n_qc = rng.below(4);
    for _ in 0..n_qc {
        let k = 1 + rng.below(n);
        let f = uniform_matrix(&mut rng, k, n, -1.0, 1.0);
        let h = SymMatrix::symmetrize(&f.transpose().mul(&f))
            .expect("square")
            .add_diag(rng.uniform(0.0, 0.5));
        let lin = uniform_vec(&mut rng, n, -1.0, 1.0);
        let r = -rng.uniform(0.5, 3.0);
        sp = sp.with_qc(ConvexQuadratic::new(h, lin, r).expect("finite data"));
    }

    let n_lin = rng.below(n / 2 + 1);
    let a = uniform_matrix(&mut rng, n_lin, n, -1.0, 1.0);
    let b = uniform_vec(&mut rng, n_lin, 0.2, 2.0);
    sp = sp.with_ineq(a, b);

    if n >= 4 && rng.next_f64() < 0.5 {
        let e = uniform_matrix(&mut rng, 1, n, -1.0, 1.0);
        sp = sp.with_eq(e, vec![0.0]);
        let i = rng.below(n);
        if sp.lb[i].is_finite() && sp.ub[i].is_finite() && rng.next_f64() < 0.5 {
            sp.lb[i] = 0.0;
            sp.ub[i] = 0.0;
        }
    } else {
        sp = sp.with_eq(Matrix::zeros(0, n), vec![]);
    }
    sp
}
