use std::fmt;

use crate::decomp::{BoundaryData, DecompError, LinearOp, NonlinearOp};
use crate::fracterm::{Series, SeriesCaps};
use crate::symx::{Domain, Poly};

/// Where the source term of a problem comes from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum SourceMode {
    /// Source, initial and boundary data taken as written.
    PaperLiteral,
    /// Source derived from the exact solution, data from its traces.
    #[default]
    Manufactured,
    /// Source manufactured once at order 1 and held fixed while the order
    /// varies; `exact` is then the order-1 reference solution.
    Frozen,
}

impl SourceMode {
    pub fn name(self) -> &'static str {
        match self {
            SourceMode::PaperLiteral => "paper-literal",
            SourceMode::Manufactured => "manufactured",
            SourceMode::Frozen => "frozen",
        }
    }
}

impl fmt::Display for SourceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `D^α u + Q u + N u = h` on a domain, with `u(·, 0) = initial` and
/// Dirichlet data on the faces.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub id: String,
    pub alpha: f64,
    pub domain: Domain,
    pub initial: Poly,
    pub boundary: Option<BoundaryData>,
    pub linear: LinearOp,
    pub nonlinear: NonlinearOp,
    pub source: Series,
    pub exact: Option<Series>,
    pub source_mode: SourceMode,
}

impl ProblemSpec {
    pub fn dimension(&self) -> usize {
        self.domain.dimension()
    }

    pub fn validate(&self) -> Result<(), DecompError> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(DecompError::Alpha(self.alpha));
        }
        self.linear.validate()?;
        self.nonlinear.validate()?;
        if let Some(b) = &self.boundary {
            if b.dimension() != self.domain.dimension() {
                return Err(DecompError::DimensionMismatch);
            }
        }
        Ok(())
    }

    /// `D^α u + Q u + N u - h` for a candidate `u`, symbolically.
    pub fn residual_series(&self, u: &Series, caps: &SeriesCaps) -> Result<Series, DecompError> {
        Ok(operator_image(u, &self.linear, &self.nonlinear, self.alpha, caps)?.sub(&self.source))
    }
}

fn operator_image(
    u: &Series,
    linear: &LinearOp,
    nonlinear: &NonlinearOp,
    alpha: f64,
    caps: &SeriesCaps,
) -> Result<Series, DecompError> {
    Ok(u.caputo(alpha)?
        .add(&linear.apply(u, caps))
        .add(&nonlinear.apply(u, caps)?))
}

/// `h = D^α u + Q u + N u` for the given exact solution.
pub fn manufacture_source(
    exact: &Series,
    linear: &LinearOp,
    nonlinear: &NonlinearOp,
    alpha: f64,
) -> Result<Series, DecompError> {
    let caps = SeriesCaps::default();
    let h = operator_image(exact, linear, nonlinear, alpha, &caps)?;
    if h.truncated() {
        return Err(DecompError::Truncated);
    }
    Ok(h)
}
