//! Problem builders, seeded generators and verification oracles.
//!
//! All generators draw from [`SplitMix64`](crate::rng::SplitMix64) in a
//! fixed order, so a seed identifies an instance on every platform.

mod corpus;
mod mpcc;
mod ncvqcqp;
mod nmpc;
mod small;

pub use corpus::{build_dca_comparison, random_convex_subproblem};
pub use mpcc::{
    build_mpcc, gen_random_mpcc, mpcc_oracle, BoxBounds, MpccData, MpccIndex, MpccOracle,
};
pub use ncvqcqp::{gen_random_ncvqcqp, NCVQCQP_ALPHA};
pub use nmpc::{build_bilinear_nmpc, BilinearNmpcData};
pub use small::{build_small_example, SmallCase};

use alloc::vec::Vec;

use crate::linalg::Matrix;
use crate::rng::SplitMix64;

/// Row-major `rows × cols` matrix of uniform draws on `[lo, hi)`.
fn uniform_matrix(rng: &mut SplitMix64, rows: usize, cols: usize, lo: f64, hi: f64) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.uniform(lo, hi)).collect();
    Matrix::from_vec(rows, cols, data).expect("sizes match")
}

fn uniform_vec(rng: &mut SplitMix64, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.uniform(lo, hi)).collect()
}
