//! Sequential convex programming for nonconvex programs with
//! difference-of-convex (DC) constraints.
//!
//! The crate solves problems of the form
//!
//! ```text
//! minimize    f(x)
//! subject to  u_i(x) - v_i(x) <= 0,   i = 1..m
//!             x in Omega
//! ```
//!
//! where `f`, `u_i`, `v_i` are convex quadratics and `Omega` is a box
//! intersected with a polyhedron. Each outer iteration linearizes the concave
//! part `-v_i` at the current point, which yields a convex QCQP that is an
//! inner approximation of the feasible set. The QCQP is solved by a primal
//! log-barrier method in [`inner`].
//!
//! Modules:
//! - [`model`]: quadratics, DC pairs, the convex set, validation and
//!   decomposition utilities.
//! - [`inner`]: convex subproblem type and the barrier solver.
//! - [`scp`]: the feasible-path method, its slack-relaxed variant, the
//!   penalty DCA baseline, and the runtime monitors.
//! - [`problems`]: builders, random generators and verification oracles.
//!
//! The crate is `no_std` (it needs `alloc`). Enabling the `std` feature only
//! adds wall-clock timing to solve reports.
#![cfg_attr(not(feature = "std"), no_std)]
// Index loops mirror the formulas; negated comparisons reject NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod eigen;
mod error;
pub mod inner;
pub mod linalg;
pub(crate) mod math;
pub mod model;
pub mod problems;
pub mod rng;
pub mod scp;

pub use error::{Error, Result};
pub use linalg::{Matrix, SymMatrix};
pub use model::{ConvexQuadratic, ConvexSetOmega, DCPair, DCProgram, Diagnostic};
