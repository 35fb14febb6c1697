use super::DecompError;
use crate::fracterm::Series;
use crate::symx::{Domain, Interval, Poly, Var};

/// One face of the spatial domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Face {
    XLo,
    XHi,
    YLo,
    YHi,
}

impl Face {
    pub fn var(self) -> Var {
        match self {
            Face::XLo | Face::XHi => Var::X,
            Face::YLo | Face::YHi => Var::Y,
        }
    }

    pub fn position(self, domain: &Domain) -> Option<f64> {
        match self {
            Face::XLo => Some(domain.x.lo),
            Face::XHi => Some(domain.x.hi),
            Face::YLo => domain.y.map(|i| i.lo),
            Face::YHi => domain.y.map(|i| i.hi),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Face::XLo => "x_lo",
            Face::XHi => "x_hi",
            Face::YLo => "y_lo",
            Face::YHi => "y_hi",
        }
    }
}

/// Dirichlet data, one series per face. In two dimensions the `x` faces are
/// functions of `y` and `t`, the `y` faces functions of `x` and `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryData {
    x: [Series; 2],
    y: Option<[Series; 2]>,
}

impl BoundaryData {
    pub fn line(lo: Series, hi: Series) -> Self {
        BoundaryData {
            x: [lo, hi],
            y: None,
        }
    }

    pub fn rect(x_lo: Series, x_hi: Series, y_lo: Series, y_hi: Series) -> Self {
        BoundaryData {
            x: [x_lo, x_hi],
            y: Some([y_lo, y_hi]),
        }
    }

    pub fn dimension(&self) -> usize {
        if self.y.is_some() {
            2
        } else {
            1
        }
    }

    pub fn face(&self, face: Face) -> Option<&Series> {
        match face {
            Face::XLo => Some(&self.x[0]),
            Face::XHi => Some(&self.x[1]),
            Face::YLo => self.y.as_ref().map(|y| &y[0]),
            Face::YHi => self.y.as_ref().map(|y| &y[1]),
        }
    }

    pub fn faces(&self) -> Vec<(Face, &Series)> {
        [Face::XLo, Face::XHi, Face::YLo, Face::YHi]
            .into_iter()
            .filter_map(|f| self.face(f).map(|s| (f, s)))
            .collect()
    }

    /// Restriction of `u` to every face of `domain`.
    pub fn trace(u: &Series, domain: &Domain) -> Self {
        let x = [u.subst(Var::X, domain.x.lo), u.subst(Var::X, domain.x.hi)];
        let y = domain
            .y
            .map(|iy| [u.subst(Var::Y, iy.lo), u.subst(Var::Y, iy.hi)]);
        BoundaryData { x, y }
    }

    pub fn sub(&self, other: &BoundaryData) -> Result<BoundaryData, DecompError> {
        let x = [self.x[0].sub(&other.x[0]), self.x[1].sub(&other.x[1])];
        let y = match (&self.y, &other.y) {
            (None, None) => None,
            (Some(a), Some(b)) => Some([a[0].sub(&b[0]), a[1].sub(&b[1])]),
            _ => return Err(DecompError::DimensionMismatch),
        };
        Ok(BoundaryData { x, y })
    }
}

/// How the correction weights are built on `[l, L]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum WeightMode {
    /// `(L - x)/(L - l)` and `(x - l)/(L - l)`.
    #[default]
    Normalized,
    /// `1 - x` and `x`, whatever the interval.
    PaperLiteral,
}

/// Which axis is corrected first in two dimensions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CorrectionOrder {
    #[default]
    XFirst,
    YFirst,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Correction {
    pub weights: WeightMode,
    pub order: CorrectionOrder,
}

fn weights(var: Var, iv: Interval, mode: WeightMode) -> Result<(Poly, Poly), DecompError> {
    let v = Poly::var(var);
    match mode {
        WeightMode::Normalized => {
            let w = iv.width();
            if w == 0.0 || !w.is_finite() {
                return Err(DecompError::DegenerateInterval(iv.lo, iv.hi));
            }
            let lo = Poly::constant(iv.hi).sub(&v).scale(1.0 / w);
            let hi = v.sub(&Poly::constant(iv.lo)).scale(1.0 / w);
            Ok((lo, hi))
        }
        WeightMode::PaperLiteral => {
            if iv.width() == 0.0 {
                return Err(DecompError::DegenerateInterval(iv.lo, iv.hi));
            }
            Ok((Poly::one().sub(&v), v))
        }
    }
}

fn correct_axis(
    u: &Series,
    var: Var,
    iv: Interval,
    g: &[Series; 2],
    mode: WeightMode,
) -> Result<Series, DecompError> {
    let (w_lo, w_hi) = weights(var, iv, mode)?;
    let gap_lo = g[0].sub(&u.subst(var, iv.lo));
    let gap_hi = g[1].sub(&u.subst(var, iv.hi));
    Ok(u.add(&gap_lo.scale_poly(&w_lo))
        .add(&gap_hi.scale_poly(&w_hi)))
}

/// Adds the linear interpolant of the boundary mismatch so the result takes
/// the prescribed face values (exactly for normalized weights).
pub fn boundary_correct(
    u: &Series,
    data: &BoundaryData,
    domain: &Domain,
    correction: &Correction,
) -> Result<Series, DecompError> {
    if data.dimension() != domain.dimension() {
        return Err(DecompError::DimensionMismatch);
    }
    match (&data.y, domain.y) {
        (None, _) => correct_axis(u, Var::X, domain.x, &data.x, correction.weights),
        (Some(gy), Some(iy)) => match correction.order {
            CorrectionOrder::XFirst => {
                let v = correct_axis(u, Var::X, domain.x, &data.x, correction.weights)?;
                correct_axis(&v, Var::Y, iy, gy, correction.weights)
            }
            CorrectionOrder::YFirst => {
                let v = correct_axis(u, Var::Y, iy, gy, correction.weights)?;
                correct_axis(&v, Var::X, domain.x, &data.x, correction.weights)
            }
        },
        (Some(_), None) => Err(DecompError::DimensionMismatch),
    }
}
