use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two objects that must share a dimension do not.
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    /// A matrix given as symmetric is not.
    NotSymmetric { row: usize, col: usize },
    /// A NaN or infinity where a finite number is required.
    NonFinite(&'static str),
    /// Jacobi sweeps hit the cap before the off-diagonal mass vanished.
    EigenNotConverged { sweeps: usize, off_norm: f64 },
    /// A precondition on an argument is violated.
    InvalidArgument(String),
    /// The program failed validation; the payload lists the violations.
    InvalidProgram(String),
    /// The convex set is empty (projection onto it has no feasible point).
    EmptyFeasibleSet,
    /// A point that must lie in the convex set does not.
    PointOutsideOmega { violation: f64 },
    /// An inner convex solve failed in a way the caller must see.
    InnerSolve(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch {
                what,
                expected,
                found,
            } => write!(f, "dimension mismatch in {what}: expected {expected}, found {found}"),
            Error::NotSymmetric { row, col } => {
                write!(f, "matrix is not symmetric at ({row}, {col})")
            }
            Error::NonFinite(what) => write!(f, "non-finite value in {what}"),
            Error::EigenNotConverged { sweeps, off_norm } => write!(
                f,
                "Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})"
            ),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::InvalidProgram(msg) => write!(f, "invalid program: {msg}"),
            Error::EmptyFeasibleSet => write!(f, "the convex set is empty"),
            Error::PointOutsideOmega { violation } => {
                write!(f, "point lies outside the convex set (violation {violation:e})")
            }
            Error::InnerSolve(msg) => write!(f, "inner solve failed: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
