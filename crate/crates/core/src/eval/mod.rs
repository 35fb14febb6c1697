//! Grid errors, PDE residuals, the fractional-integral quadrature oracle and
//! report writers.

mod error;
mod grid;
mod quadrature;
mod report;

pub use error::{grid_error, residual, ErrorReport, PointError};
pub use grid::{Grid, GridSpec};
pub use quadrature::{
    gauss_jacobi, rl_integral_quadrature, rl_integral_quadrature_with, QuadratureOptions,
};
pub use report::{
    convergence_report, points_header, write_plot_data, write_points, write_summary,
    ConvergenceRow, PlotCurve, SUMMARY_HEADER,
};

use crate::decomp::DecompError;
use crate::fracterm::FracError;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error(transparent)]
    Frac(#[from] FracError),
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error("grid: {0}")]
    Grid(String),
    #[error("fractional order {0} must lie in (0, 1]")]
    Order(f64),
    #[error("quadrature: {0}")]
    Quadrature(String),
    #[error(
        "quadrature did not converge: {estimate} vs {alternate} at half resolution (tol {tol})"
    )]
    NotConverged {
        estimate: f64,
        alternate: f64,
        tol: f64,
    },
    #[error("{0}")]
    Mismatch(String),
}
