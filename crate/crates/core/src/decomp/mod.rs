//! Decomposition solvers for `D^α u + Q u + N u = h`.

mod boundary;
mod ops;
mod polys;
mod solve;

pub use boundary::{boundary_correct, BoundaryData, Correction, CorrectionOrder, Face, WeightMode};
pub use ops::{Factor, LinearOp, LinearTerm, NonlinearOp, Product, MAX_NONLINEAR_DEGREE};
pub use polys::{adomian_polys, jafari_polys};
pub use solve::{ladm_solve, mldm_solve, solve, IterationRecord, Method, SolveOptions, SolveTrace};

use crate::fracterm::FracError;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum DecompError {
    #[error(transparent)]
    Frac(#[from] FracError),
    #[error("interval [{0}, {1}] has zero width")]
    DegenerateInterval(f64, f64),
    #[error("boundary data is required for the modified method")]
    MissingBoundary,
    #[error("boundary data and domain have different dimensions")]
    DimensionMismatch,
    #[error("nonlinear term of degree {0} (at most 3 supported)")]
    UnsupportedDegree(u32),
    #[error("derivative of order {0} (at most 2 supported)")]
    UnsupportedOrder(u8),
    #[error("series growth cap reached")]
    Truncated,
    #[error("empty component list")]
    EmptyInput,
    #[error("fractional order {0} must lie in (0, 1]")]
    Alpha(f64),
}
