//! Fixtures shared by the benchmarks.

use fracdecomp::fracterm::Series;
use fracdecomp::problems::{builtin, ProblemSpec, SourceMode};

/// A mid-sized series with polynomial and transcendental coefficients.
pub fn sample_series() -> Series {
    Series::parse(
        "t^0.5*(1 + x + x^2) + t^1.3*sin(x) + t^2*exp(x)*x + t^3.1*cos(2*x) + 4",
        None,
    )
    .expect("fixture parses")
}

pub fn problem(id: &str, alpha: f64) -> ProblemSpec {
    builtin(id, alpha, SourceMode::Manufactured).expect("built-in problem")
}
