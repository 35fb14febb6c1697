use std::cmp::Ordering;
use std::fmt;

use super::gamma::gamma_ratio;
use super::FracError;
use crate::symx::{
    is_cancelled_zero, parse, Ast, AstKind, Expr, Func, ParseError, Point, Poly, Var,
};

/// Time exponents closer than this are merged.
pub const MU_TOL: f64 = 1e-12;

/// Growth limits applied to products and solver iterates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesCaps {
    pub max_terms: usize,
    pub max_mu: f64,
}

impl Default for SeriesCaps {
    fn default() -> Self {
        SeriesCaps {
            max_terms: 512,
            max_mu: 64.0,
        }
    }
}

/// `coeff(x, y) * t^mu`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeTerm {
    pub mu: f64,
    pub coeff: Poly,
}

/// Finite sum of time-power terms, sorted by exponent with no two exponents
/// within [`MU_TOL`] of each other and no zero coefficients.
///
/// `truncated` records that a growth cap dropped terms somewhere in the
/// history of this value.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Series {
    terms: Vec<TimeTerm>,
    truncated: bool,
}

impl Series {
    pub fn zero() -> Self {
        Series::default()
    }

    pub fn one() -> Self {
        Series::constant(Poly::one())
    }

    /// A time-independent series.
    pub fn constant(coeff: impl Into<Poly>) -> Self {
        Series::term(0.0, coeff)
    }

    pub fn term(mu: f64, coeff: impl Into<Poly>) -> Self {
        assert!(mu >= 0.0, "negative time exponent {mu}");
        Series::from_terms(vec![TimeTerm {
            mu,
            coeff: coeff.into(),
        }])
    }

    pub fn from_terms(terms: Vec<TimeTerm>) -> Self {
        Series::canonical(terms, false)
    }

    fn canonical(mut terms: Vec<TimeTerm>, truncated: bool) -> Self {
        terms.sort_by(|a, b| a.mu.total_cmp(&b.mu));
        let mut out: Vec<TimeTerm> = Vec::with_capacity(terms.len());
        for term in terms {
            match out.last_mut() {
                Some(last) if (term.mu - last.mu).abs() <= MU_TOL => {
                    last.coeff.add_assign(&term.coeff);
                }
                _ => out.push(term),
            }
        }
        out.retain(|t| !is_cancelled_zero(&t.coeff));
        Series {
            terms: out,
            truncated,
        }
    }

    pub fn terms(&self) -> &[TimeTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn max_mu(&self) -> f64 {
        self.terms.last().map_or(0.0, |t| t.mu)
    }

    /// Number of monomials over all coefficients.
    pub fn size(&self) -> usize {
        self.terms.iter().map(|t| t.coeff.len()).sum()
    }

    pub fn add(&self, other: &Series) -> Series {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Series::canonical(terms, self.truncated || other.truncated)
    }

    pub fn sub(&self, other: &Series) -> Series {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Series {
        self.scale(-1.0)
    }

    pub fn scale(&self, k: f64) -> Series {
        self.map_coeffs(|c| c.scale(k))
    }

    pub fn scale_poly(&self, k: &Poly) -> Series {
        self.map_coeffs(|c| c.mul(k))
    }

    fn map_coeffs(&self, f: impl Fn(&Poly) -> Poly) -> Series {
        let terms = self
            .terms
            .iter()
            .map(|t| TimeTerm {
                mu: t.mu,
                coeff: f(&t.coeff),
            })
            .collect();
        Series::canonical(terms, self.truncated)
    }

    pub fn mul(&self, other: &Series) -> Series {
        self.mul_with(other, &SeriesCaps::default())
    }

    /// Pairwise product; terms beyond the caps are dropped and flagged.
    pub fn mul_with(&self, other: &Series, caps: &SeriesCaps) -> Series {
        let mut truncated = self.truncated || other.truncated;
        let mut terms = Vec::with_capacity(self.len() * other.len());
        for a in &self.terms {
            for b in &other.terms {
                let mu = a.mu + b.mu;
                if mu > caps.max_mu + MU_TOL {
                    truncated = true;
                    continue;
                }
                terms.push(TimeTerm {
                    mu,
                    coeff: a.coeff.mul(&b.coeff),
                });
            }
        }
        Series::canonical(terms, truncated).truncate(caps)
    }

    /// Applies the caps: drops exponents above `max_mu`, then keeps the
    /// `max_terms` lowest exponents.
    pub fn truncate(mut self, caps: &SeriesCaps) -> Series {
        let before = self.terms.len();
        self.terms.retain(|t| t.mu <= caps.max_mu + MU_TOL);
        self.terms.truncate(caps.max_terms);
        if self.terms.len() != before {
            self.truncated = true;
        }
        self
    }

    /// Riemann-Liouville integral of order `alpha`, termwise:
    /// `t^mu -> Γ(mu+1)/Γ(mu+1+alpha) t^(mu+alpha)`.
    pub fn frac_integral(&self, alpha: f64) -> Result<Series, FracError> {
        if alpha <= 0.0 || !alpha.is_finite() {
            return Err(FracError::Order(alpha));
        }
        let mut terms = Vec::with_capacity(self.len());
        for t in &self.terms {
            let k = gamma_ratio(t.mu + 1.0, t.mu + 1.0 + alpha)?;
            terms.push(TimeTerm {
                mu: t.mu + alpha,
                coeff: t.coeff.scale(k),
            });
        }
        Ok(Series::canonical(terms, self.truncated))
    }

    /// Caputo derivative of order `0 < alpha <= 1`, termwise: constants in
    /// time vanish and `t^mu -> Γ(mu+1)/Γ(mu+1-alpha) t^(mu-alpha)`.
    pub fn caputo(&self, alpha: f64) -> Result<Series, FracError> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(FracError::Order(alpha));
        }
        let mut terms = Vec::with_capacity(self.len());
        for t in &self.terms {
            if t.mu.abs() <= MU_TOL {
                continue;
            }
            let mut mu = t.mu - alpha;
            if mu < -MU_TOL {
                return Err(FracError::NegativeExponent { mu: t.mu, alpha });
            }
            if mu < 0.0 {
                mu = 0.0;
            }
            let k = gamma_ratio(t.mu + 1.0, t.mu + 1.0 - alpha)?;
            terms.push(TimeTerm {
                mu,
                coeff: t.coeff.scale(k),
            });
        }
        Ok(Series::canonical(terms, self.truncated))
    }

    /// Spatial derivative of the given order, applied to every coefficient.
    pub fn spatial_apply(&self, order: u8, var: Var) -> Series {
        let mut out = self.clone();
        for _ in 0..order {
            out = out.map_coeffs(|c| c.diff(var));
        }
        out
    }

    /// Evaluates at a space-time point with the convention `0^0 = 1`.
    pub fn eval(&self, point: &Point, t: f64) -> Result<f64, FracError> {
        if t < 0.0 {
            return Err(FracError::NegativeTime(t));
        }
        let mut acc = 0.0;
        for term in &self.terms {
            let tp = if t == 0.0 {
                if term.mu == 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                t.powf(term.mu)
            };
            if tp != 0.0 {
                acc += term.coeff.eval(point)? * tp;
            }
        }
        Ok(acc)
    }

    /// Values at one spatial point for many times; each coefficient is
    /// evaluated once.
    pub fn eval_times(&self, point: &Point, ts: &[f64]) -> Result<Vec<f64>, FracError> {
        if let Some(&t) = ts.iter().find(|t| **t < 0.0) {
            return Err(FracError::NegativeTime(t));
        }
        let coeffs = self
            .terms
            .iter()
            .map(|term| term.coeff.eval(point))
            .collect::<Result<Vec<f64>, _>>()?;
        Ok(ts
            .iter()
            .map(|&t| {
                self.terms
                    .iter()
                    .zip(&coeffs)
                    .map(|(term, c)| {
                        if t == 0.0 {
                            if term.mu == 0.0 {
                                *c
                            } else {
                                0.0
                            }
                        } else {
                            c * t.powf(term.mu)
                        }
                    })
                    .sum()
            })
            .collect())
    }

    /// Substitutes a constant for a spatial variable in every coefficient.
    pub fn subst(&self, var: Var, value: f64) -> Series {
        self.map_coeffs(|c| c.subst(var, value))
    }

    /// The time-independent part, `u(x, 0)`.
    pub fn initial_value(&self) -> Poly {
        match self.terms.first() {
            Some(t) if t.mu == 0.0 => t.coeff.clone(),
            _ => Poly::zero(),
        }
    }

    pub fn without_initial_value(&self) -> Series {
        Series {
            terms: self.terms.iter().filter(|t| t.mu != 0.0).cloned().collect(),
            truncated: self.truncated,
        }
    }

    /// Largest coefficient mismatch between two series, each monomial
    /// difference measured relative to `1 + |c|`. Exponents not present on
    /// both sides count in full.
    pub fn max_coeff_diff(&self, other: &Series) -> f64 {
        let mut worst: f64 = 0.0;
        let mut i = 0;
        let mut j = 0;
        let (a, b) = (&self.terms, &other.terms);
        let diff = |p: &Poly, q: &Poly| -> f64 {
            let mut w: f64 = 0.0;
            for (m, c) in p.terms() {
                let d = q.coefficient(m);
                w = w.max((c - d).abs() / (1.0 + c.abs().max(d.abs())));
            }
            for (m, d) in q.terms() {
                if p.coefficient(m) == 0.0 {
                    w = w.max(d.abs() / (1.0 + d.abs()));
                }
            }
            w
        };
        let zero = Poly::zero();
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) if (x.mu - y.mu).abs() <= MU_TOL => Ordering::Equal,
                (Some(x), Some(y)) => x.mu.total_cmp(&y.mu),
                (Some(_), None) => Ordering::Less,
                (None, _) => Ordering::Greater,
            };
            match ord {
                Ordering::Equal => {
                    worst = worst.max(diff(&a[i].coeff, &b[j].coeff));
                    i += 1;
                    j += 1;
                }
                Ordering::Less => {
                    worst = worst.max(diff(&a[i].coeff, &zero));
                    i += 1;
                }
                Ordering::Greater => {
                    worst = worst.max(diff(&zero, &b[j].coeff));
                    j += 1;
                }
            }
        }
        worst
    }

    /// Builds a series from a parsed expression in `x`, `y`, `t`, `alpha`.
    pub fn from_ast(ast: &Ast, alpha: Option<f64>) -> Result<Series, ParseError> {
        use AstKind::*;
        if let Some(v) = ast.const_value(alpha)? {
            return Ok(Series::constant(v));
        }
        Ok(match &ast.kind {
            Num(_) | Alpha => unreachable!("folded above"),
            X => Series::constant(Poly::var(Var::X)),
            Y => Series::constant(Poly::var(Var::Y)),
            T => Series::term(1.0, 1.0),
            Neg(a) => Series::from_ast(a, alpha)?.neg(),
            Add(a, b) => Series::from_ast(a, alpha)?.add(&Series::from_ast(b, alpha)?),
            Sub(a, b) => Series::from_ast(a, alpha)?.sub(&Series::from_ast(b, alpha)?),
            Mul(a, b) => Series::from_ast(a, alpha)?.mul(&Series::from_ast(b, alpha)?),
            Div(a, b) => {
                let denom = Series::from_ast(b, alpha)?;
                let inv = match denom.terms.as_slice() {
                    [t] if t.mu == 0.0 => Poly::pow_real(&t.coeff, -1.0),
                    _ => return Err(b.error("divisor must not depend on t")),
                };
                Series::from_ast(a, alpha)?.scale_poly(&inv)
            }
            Pow(a, b) => {
                let e = b
                    .const_value(alpha)?
                    .ok_or_else(|| b.error("exponent must be constant"))?;
                let base = Series::from_ast(a, alpha)?;
                match base.terms.as_slice() {
                    [] => Series::zero(),
                    [t] => {
                        let mu = t.mu * e;
                        if mu < 0.0 {
                            return Err(ast.error("negative power of t"));
                        }
                        Series::term(mu, Poly::pow_real(&t.coeff, e))
                    }
                    _ if e >= 0.0 && e.fract() == 0.0 => {
                        (0..e as u32).fold(Series::one(), |acc, _| acc.mul(&base))
                    }
                    _ => return Err(ast.error("non-integer power of a sum involving t")),
                }
            }
            Call(func, a) => {
                let arg = Series::from_ast(a, alpha)?;
                let p = match arg.terms.as_slice() {
                    [] => Poly::zero(),
                    [t] if t.mu == 0.0 => t.coeff.clone(),
                    _ => return Err(a.error(format!("argument of {func} must not depend on t"))),
                };
                Series::constant(match func {
                    Func::Sin => Poly::sin(&p),
                    Func::Cos => Poly::cos(&p),
                    Func::Exp => Poly::exp(&p),
                    Func::Gamma => unreachable!("gamma always folds or errors"),
                })
            }
        })
    }

    /// Parses `src` in the problem-file grammar.
    pub fn parse(src: &str, alpha: Option<f64>) -> Result<Series, ParseError> {
        Series::from_ast(&parse(src)?, alpha)
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let c = Expr::from_poly(&t.coeff);
            let coeff = match c {
                Expr::Sum(_) => format!("({c})"),
                _ => c.to_string(),
            };
            if t.mu == 0.0 {
                write!(f, "{coeff}")?;
            } else if t.mu == 1.0 {
                write!(f, "{coeff}*t")?;
            } else {
                write!(f, "{coeff}*t^{}", t.mu)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracterm::gamma;

    fn s(src: &str, alpha: f64) -> Series {
        Series::parse(src, Some(alpha)).unwrap()
    }

    #[test]
    fn integral_examples() {
        assert!(Series::zero().frac_integral(0.7).unwrap().is_zero());
        assert_eq!(
            Series::one().frac_integral(1.0).unwrap(),
            Series::term(1.0, 1.0)
        );
        for alpha in [0.3, 0.8, 1.0] {
            let h = s("x^2*2*t^(2-alpha)/gamma(3-alpha)", alpha);
            let u = h.frac_integral(alpha).unwrap();
            assert_eq!(u.len(), 1);
            assert!((u.terms()[0].mu - 2.0).abs() <= MU_TOL);
            let expected = s("x^2*t^2", alpha);
            assert!(u.max_coeff_diff(&expected) < 1e-13, "alpha {alpha}: {u}");
        }
        assert!(matches!(
            Series::one().frac_integral(0.0),
            Err(FracError::Order(_))
        ));
    }

    #[test]
    fn caputo_examples() {
        let alpha = 0.6;
        assert!(s("x*(2-x)", alpha).caputo(alpha).unwrap().is_zero());
        let d = s("x*(2-x)*t^2", alpha).caputo(alpha).unwrap();
        let expected = s("x*(2-x)*2*t^(2-alpha)/gamma(3-alpha)", alpha);
        assert!(d.max_coeff_diff(&expected) < 1e-13);
        let d = s("sin(x)*t^(3+alpha)", alpha).caputo(alpha).unwrap();
        let expected = s("sin(x)*gamma(4+alpha)/6*t^3", alpha);
        assert!(d.max_coeff_diff(&expected) < 1e-13);
        assert!(s("t", 1.0).caputo(1.5).is_err());
        assert!(s("t^0.2", 1.0).caputo(0.5).is_err());
    }

    #[test]
    fn linear_algebra_examples() {
        let u = s("t^2*x + sin(x)*t^0.5", 1.0);
        assert_eq!(u.add(&Series::zero()), u);
        assert_eq!(u.scale(1.0), u);
        assert!(s("t^2*x", 1.0).add(&s("t^2*(-x)", 1.0)).is_zero());
        assert_eq!(u.mul(&Series::one()), u);
    }

    #[test]
    fn product_examples() {
        let a = s("x^2*t^2", 1.0);
        assert_eq!(a.mul(&a), s("x^4*t^4", 1.0));
        let u = s("t^2*sin(2*pi*x)", 1.0);
        let ux = u.spatial_apply(1, Var::X);
        let expected = s("2*pi*t^4*sin(2*pi*x)*cos(2*pi*x)", 1.0);
        assert!(u.mul(&ux).max_coeff_diff(&expected) < 1e-14);
    }

    #[test]
    fn product_caps_truncate_visibly() {
        let a = s("t^40*x + t", 1.0);
        let caps = SeriesCaps::default();
        let p = a.mul_with(&a, &caps);
        assert!(p.truncated());
        assert!(p.max_mu() <= caps.max_mu);
        assert_eq!(p.len(), 2);
        let tight = SeriesCaps {
            max_terms: 1,
            max_mu: 64.0,
        };
        let q = s("t + t^2", 1.0).mul_with(&Series::one(), &tight);
        assert!(q.truncated());
        assert_eq!(q.len(), 1);
        // the flag survives later arithmetic
        assert!(q.add(&Series::one()).truncated());
    }

    #[test]
    fn spatial_derivatives() {
        let u = s("x*(2-x)*t^2", 1.0);
        assert_eq!(u.spatial_apply(2, Var::X), s("-2*t^2", 1.0));
        assert_eq!(u.spatial_apply(0, Var::X), u);
        let e = s("exp(x)", 1.0);
        assert_eq!(e.spatial_apply(1, Var::X), e);
    }

    #[test]
    fn evaluation_conventions() {
        let u = s("t^2*x*(2-x)", 1.0);
        assert_eq!(u.eval(&Point::x(1.0), 1.0).unwrap(), 1.0);
        let v = s("t^3*cos(x) + exp(x)", 1.0);
        assert_eq!(v.eval(&Point::x(0.0), 1.0).unwrap(), 2.0);
        assert_eq!(v.eval(&Point::x(0.0), 0.0).unwrap(), 1.0);
        assert!(v.eval(&Point::x(0.0), -1.0).is_err());
    }

    #[test]
    fn exponents_merge_within_tolerance() {
        let a = Series::term(1.0, 1.0);
        let b = Series::term(1.0 + 1e-13, 2.0);
        let sum = a.add(&b);
        assert_eq!(sum.len(), 1);
        assert_eq!(sum.terms()[0].coeff.as_constant(), Some(3.0));
    }

    #[test]
    fn gamma_constants_in_parsed_sources() {
        let alpha = 0.5;
        let h = s("t^(1-alpha)*sin(x)/gamma(2-alpha)", alpha);
        let k = h.terms()[0].coeff.max_abs_coefficient();
        assert!((k - 1.0 / gamma(1.5).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn parse_rejects_time_in_transcendental_arguments() {
        assert!(Series::parse("sin(t)", None).is_err());
        assert!(Series::parse("x/t", None).is_err());
        assert!(Series::parse("t^(-1)", None).is_err());
        assert!(Series::parse("(t + x)^0.5", None).is_err());
    }
}
