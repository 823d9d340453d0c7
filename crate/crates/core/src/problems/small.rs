use alloc::vec;

use crate::linalg::SymMatrix;
use crate::model::{ConvexQuadratic, ConvexSetOmega, DCPair, DCProgram};

/// The two decompositions of the 2-D illustrative constraint
/// `x₁² − x₂² − 4 ≤ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SmallCase {
    /// `u = x₁² − 4`, `v = x₂²`
    Case1,
    /// `u = x₁² + x₂² − 4`, `v = 2x₂²`
    Case2,
}

/// `min −4x₁ + x₂` over `[−3,3]×[−2,2]` subject to `x₁² − x₂² ≤ 4`.
pub fn build_small_example(case: SmallCase) -> DCProgram {
    let f = DCPair::convex(ConvexQuadratic::affine(vec![-4.0, 1.0], 0.0));
    let (u, v) = match case {
        SmallCase::Case1 => ([2.0, 0.0], [0.0, 2.0]),
        SmallCase::Case2 => ([2.0, 2.0], [0.0, 4.0]),
    };
    let u = ConvexQuadratic::new(SymMatrix::diagonal(&u), vec![0.0; 2], -4.0).expect("finite data");
    let v = ConvexQuadratic::new(SymMatrix::diagonal(&v), vec![0.0; 2], 0.0).expect("finite data");
    let g = DCPair::new(u, v).expect("same dimension");
    let omega = ConvexSetOmega::boxed(vec![-3.0, -2.0], vec![3.0, 2.0]);
    DCProgram::new(f, vec![g], omega)
}
