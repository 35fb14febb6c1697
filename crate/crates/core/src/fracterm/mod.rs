//! Time-power term algebra.
//!
//! Every solution, source and boundary function is a [`Series`], a finite sum
//! `Σ c_k(x, y) t^μ_k`. On this class the Laplace round trip
//! `L⁻¹{s^-α L{·}}` is exactly the fractional integral `I^α`, which acts
//! termwise through a Gamma-function ratio.

mod gamma;
mod series;

pub use gamma::{gamma, gamma_ratio, ln_gamma};
pub use series::{Series, SeriesCaps, TimeTerm, MU_TOL};

use crate::symx::SymError;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum FracError {
    #[error("Gamma function pole at {0}")]
    Pole(f64),
    #[error("fractional order {0} is outside the supported range")]
    Order(f64),
    #[error("Caputo derivative of order {alpha} would give t^{mu}-{alpha} a negative exponent")]
    NegativeExponent { mu: f64, alpha: f64 },
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error(transparent)]
    Sym(#[from] SymError),
}
