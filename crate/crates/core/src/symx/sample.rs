use super::expr::Expr;
use super::poly::{Point, Poly};
use super::SymError;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn at(&self, s: f64) -> f64 {
        self.lo + s * (self.hi - self.lo)
    }
}

/// Spatial domain: an interval in `x`, optionally a second one in `y`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Domain {
    pub x: Interval,
    pub y: Option<Interval>,
}

impl Domain {
    pub fn line(lo: f64, hi: f64) -> Self {
        Domain {
            x: Interval::new(lo, hi),
            y: None,
        }
    }

    pub fn rect(x: Interval, y: Interval) -> Self {
        Domain { x, y: Some(y) }
    }

    pub fn dimension(&self) -> usize {
        if self.y.is_some() {
            2
        } else {
            1
        }
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

/// Deterministic Halton points (bases 2 and 3) in the domain interior.
pub fn sample_points(domain: &Domain, n: usize) -> Vec<Point> {
    (1..=n as u64)
        .map(|i| {
            let x = domain.x.at(radical_inverse(i, 2));
            match domain.y {
                Some(y) => Point::xy(x, y.at(radical_inverse(i, 3))),
                None => Point::x(x),
            }
        })
        .collect()
}

/// Semantic equality by sampling.
///
/// True iff `|a - b| <= tol * (1 + |a|)` at every one of `n_samples`
/// quasi-random points. A `false` answer is a proof of inequality; `true`
/// is probabilistic.
pub fn equal_sampled(
    a: &Expr,
    b: &Expr,
    domain: &Domain,
    n_samples: usize,
    tol: f64,
) -> Result<bool, SymError> {
    if n_samples == 0 || tol <= 0.0 {
        return Err(SymError::Domain(
            "equal_sampled needs n_samples >= 1 and tol > 0".into(),
        ));
    }
    for p in sample_points(domain, n_samples) {
        let va = a.eval(&p)?;
        let vb = b.eval(&p)?;
        if (va - vb).abs() > tol * (1.0 + va.abs()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Canonical-form counterpart of [`equal_sampled`].
pub fn poly_equal_sampled(
    a: &Poly,
    b: &Poly,
    domain: &Domain,
    n_samples: usize,
    tol: f64,
) -> Result<bool, SymError> {
    if a == b {
        return Ok(true);
    }
    equal_sampled(
        &Expr::from_poly(a),
        &Expr::from_poly(b),
        domain,
        n_samples,
        tol,
    )
}

/// Number of points used by [`is_cancelled_zero`].
pub const ZERO_PROBE_SAMPLES: usize = 12;

/// Detects coefficients that vanish identically without being structurally
/// empty (trigonometric identities and the like): the value at every probe
/// point must be at round-off level relative to the size of the individual
/// monomial contributions.
pub fn is_cancelled_zero(p: &Poly) -> bool {
    if p.is_zero() {
        return true;
    }
    if p.len() < 2 || p.is_polynomial() {
        return false;
    }
    let probe = Domain::rect(Interval::new(0.0, 1.0), Interval::new(0.0, 1.0));
    for pt in sample_points(&probe, ZERO_PROBE_SAMPLES) {
        match (p.eval(&pt), p.eval_abs(&pt)) {
            (Ok(v), Ok(scale)) => {
                if v.abs() > 1e-12 * scale {
                    return false;
                }
            }
            _ => return false,
        }
    }
    true
}
