use std::collections::BTreeMap;
use std::fmt;

use super::DecompError;
use crate::fracterm::{Series, SeriesCaps};
use crate::symx::Var;

/// `coeff * ∂^order u / ∂var^order`. A time-independent constant `coeff` is
/// the common case; a general series coefficient carries terms such as
/// `-4π² t² sin(2πx) u` that are linear in `u` with variable weight.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearTerm {
    pub order: u8,
    pub var: Var,
    pub coeff: Series,
}

/// The linear part `Q` of `D^α u + Q u + N u = h`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearOp {
    pub terms: Vec<LinearTerm>,
}

impl LinearOp {
    pub fn new() -> Self {
        LinearOp::default()
    }

    pub fn with(self, order: u8, var: Var, coeff: f64) -> Self {
        self.with_series(order, var, Series::constant(coeff))
    }

    pub fn with_series(mut self, order: u8, var: Var, coeff: Series) -> Self {
        self.terms.push(LinearTerm { order, var, coeff });
        self
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn validate(&self) -> Result<(), DecompError> {
        for t in &self.terms {
            if t.order > 2 {
                return Err(DecompError::UnsupportedOrder(t.order));
            }
        }
        Ok(())
    }

    pub fn apply(&self, u: &Series, caps: &SeriesCaps) -> Series {
        let mut out = Series::zero();
        for t in &self.terms {
            let du = u.spatial_apply(t.order, t.var);
            let scaled = match constant_factor(&t.coeff) {
                Some(c) => du.scale(c),
                None => t.coeff.mul_with(&du, caps),
            };
            out = out.add(&scaled);
        }
        out
    }
}

fn constant_factor(s: &Series) -> Option<f64> {
    match s.terms() {
        [] => Some(0.0),
        [t] if t.mu == 0.0 => t.coeff.as_constant(),
        _ => None,
    }
}

/// `(∂^order u / ∂var^order)^power`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Factor {
    pub order: u8,
    pub var: Var,
    pub power: u32,
}

impl Factor {
    pub fn u(power: u32) -> Self {
        Factor {
            order: 0,
            var: Var::X,
            power,
        }
    }

    pub fn d(order: u8, var: Var) -> Self {
        Factor {
            order,
            var,
            power: 1,
        }
    }

    fn key(&self) -> (u8, Var) {
        if self.order == 0 {
            (0, Var::X)
        } else {
            (self.order, self.var)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Product {
    pub coeff: f64,
    pub factors: Vec<Factor>,
}

impl Product {
    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|f| f.power).sum()
    }
}

/// The nonlinear part `N`: a sum of products of derivatives of `u`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NonlinearOp {
    pub products: Vec<Product>,
}

pub const MAX_NONLINEAR_DEGREE: u32 = 3;

impl NonlinearOp {
    pub fn none() -> Self {
        NonlinearOp::default()
    }

    pub fn with(mut self, coeff: f64, factors: Vec<Factor>) -> Self {
        self.products.push(Product { coeff, factors });
        self
    }

    pub fn is_empty(&self) -> bool {
        self.products.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.products.iter().map(Product::degree).max().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<(), DecompError> {
        for p in &self.products {
            if p.degree() > MAX_NONLINEAR_DEGREE {
                return Err(DecompError::UnsupportedDegree(p.degree()));
            }
            for f in &p.factors {
                if f.order > 2 {
                    return Err(DecompError::UnsupportedOrder(f.order));
                }
            }
        }
        Ok(())
    }

    /// Distinct derivatives of `u` the operator reads, as `(order, var)`.
    pub fn derivatives(&self) -> Vec<(u8, Var)> {
        let mut keys: Vec<(u8, Var)> = self
            .products
            .iter()
            .flat_map(|p| p.factors.iter().map(Factor::key))
            .collect();
        keys.sort();
        keys.dedup();
        keys
    }

    fn derivative_table(&self, u: &Series) -> BTreeMap<(u8, Var), Series> {
        self.derivatives()
            .into_iter()
            .map(|(order, var)| ((order, var), u.spatial_apply(order, var)))
            .collect()
    }

    pub fn apply(&self, u: &Series, caps: &SeriesCaps) -> Result<Series, DecompError> {
        self.validate()?;
        let table = self.derivative_table(u);
        let mut out = Series::zero();
        for p in &self.products {
            let mut acc = Series::constant(p.coeff);
            for f in &p.factors {
                let d = &table[&f.key()];
                for _ in 0..f.power {
                    acc = acc.mul_with(d, caps);
                }
            }
            out = out.add(&acc);
        }
        Ok(out)
    }

    /// Pointwise value given the derivative values, keyed as in
    /// [`NonlinearOp::derivatives`].
    pub fn eval_pointwise(&self, values: &BTreeMap<(u8, Var), f64>) -> f64 {
        self.products
            .iter()
            .map(|p| {
                p.factors.iter().fold(p.coeff, |acc, f| {
                    acc * values[&f.key()].powi(f.power as i32)
                })
            })
            .sum()
    }

    /// Grade-by-grade expansion of `N(Σ λ^i u_i)`: entry `k` is the
    /// coefficient of `λ^k`, for `k = 0..components.len()`.
    pub fn graded_apply(
        &self,
        components: &[Series],
        caps: &SeriesCaps,
    ) -> Result<Vec<Series>, DecompError> {
        self.validate()?;
        let n = components.len();
        let mut out = vec![Series::zero(); n];
        if n == 0 {
            return Ok(out);
        }
        let keys = self.derivatives();
        let graded: BTreeMap<(u8, Var), Vec<Series>> = keys
            .into_iter()
            .map(|(order, var)| {
                let g = components
                    .iter()
                    .map(|c| c.spatial_apply(order, var))
                    .collect();
                ((order, var), g)
            })
            .collect();
        for p in &self.products {
            let mut acc: Vec<Series> = std::iter::once(Series::constant(p.coeff))
                .chain(std::iter::repeat_n(Series::zero(), n - 1))
                .collect();
            for f in &p.factors {
                let g = &graded[&f.key()];
                for _ in 0..f.power {
                    acc = graded_mul(&acc, g, caps);
                }
            }
            for (o, a) in out.iter_mut().zip(acc) {
                *o = o.add(&a);
            }
        }
        Ok(out)
    }
}

/// Cauchy product of two grade sequences, truncated to the shorter length.
fn graded_mul(a: &[Series], b: &[Series], caps: &SeriesCaps) -> Vec<Series> {
    let n = a.len().min(b.len());
    (0..n)
        .map(|k| {
            (0..=k).fold(Series::zero(), |acc, i| {
                if a[i].is_zero() || b[k - i].is_zero() {
                    acc
                } else {
                    acc.add(&a[i].mul_with(&b[k - i], caps))
                }
            })
        })
        .collect()
}

fn derivative_name(order: u8, var: Var) -> String {
    if order == 0 {
        "u".to_string()
    } else {
        format!("u_{}", var.name().repeat(order as usize))
    }
}

fn signed(f: &mut fmt::Formatter<'_>, first: bool, c: f64, body: &str) -> fmt::Result {
    let sep = match (first, c < 0.0) {
        (true, true) => "-",
        (true, false) => "",
        (false, true) => " - ",
        (false, false) => " + ",
    };
    if c.abs() == 1.0 {
        write!(f, "{sep}{body}")
    } else {
        write!(f, "{sep}{}*{body}", c.abs())
    }
}

impl fmt::Display for LinearOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let body = derivative_name(t.order, t.var);
            match constant_factor(&t.coeff) {
                Some(c) => signed(f, i == 0, c, &body)?,
                None => {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "({})*{body}", t.coeff)?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for NonlinearOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.products.is_empty() {
            return f.write_str("0");
        }
        for (i, p) in self.products.iter().enumerate() {
            let body: Vec<String> = p
                .factors
                .iter()
                .map(|fac| {
                    let d = derivative_name(fac.order, fac.var);
                    if fac.power == 1 {
                        d
                    } else {
                        format!("{d}^{}", fac.power)
                    }
                })
                .collect();
            signed(f, i == 0, p.coeff, &body.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(src: &str) -> Series {
        Series::parse(src, Some(1.0)).unwrap()
    }

    #[test]
    fn linear_operator_of_problem_one() {
        // Q u = u - u_xx on u = t^2 x(2-x)
        let q = LinearOp::new().with(0, Var::X, 1.0).with(2, Var::X, -1.0);
        let u = s("t^2*x*(2-x)");
        let caps = SeriesCaps::default();
        assert_eq!(q.apply(&u, &caps), s("t^2*x*(2-x) + 2*t^2"));
    }

    #[test]
    fn series_coefficient_linear_term() {
        let q = LinearOp::new().with_series(0, Var::X, s("t^2*x"));
        let caps = SeriesCaps::default();
        assert_eq!(q.apply(&s("t*x"), &caps), s("t^3*x^2"));
    }

    #[test]
    fn nonlinear_apply_and_pointwise_agree() {
        // u u_x - u u_xx
        let n = NonlinearOp::none()
            .with(1.0, vec![Factor::u(1), Factor::d(1, Var::X)])
            .with(-1.0, vec![Factor::u(1), Factor::d(2, Var::X)]);
        let u = s("t^2*sin(2*x) + t*x^2");
        let caps = SeriesCaps::default();
        let sym = n.apply(&u, &caps).unwrap();
        let p = crate::symx::Point::x(0.3);
        let t = 0.7;
        let mut values = BTreeMap::new();
        for key in n.derivatives() {
            values.insert(key, u.spatial_apply(key.0, key.1).eval(&p, t).unwrap());
        }
        let direct = n.eval_pointwise(&values);
        assert!((sym.eval(&p, t).unwrap() - direct).abs() < 1e-13);
    }

    #[test]
    fn degree_limit_enforced() {
        let n = NonlinearOp::none().with(1.0, vec![Factor::u(4)]);
        assert!(matches!(
            n.apply(&Series::one(), &SeriesCaps::default()),
            Err(DecompError::UnsupportedDegree(4))
        ));
        let q = LinearOp::new().with(3, Var::X, 1.0);
        assert!(matches!(
            q.validate(),
            Err(DecompError::UnsupportedOrder(3))
        ));
    }

    #[test]
    fn graded_square_matches_hand_expansion() {
        let n = NonlinearOp::none().with(1.0, vec![Factor::u(2)]);
        let comps = vec![s("x*t"), s("t^2"), s("x^2*t^3")];
        let g = n.graded_apply(&comps, &SeriesCaps::default()).unwrap();
        assert_eq!(g[0], s("x^2*t^2"));
        assert_eq!(g[1], s("2*x*t^3"));
        assert_eq!(g[2], s("t^4 + 2*x^3*t^4"));
    }

    #[test]
    fn display_forms() {
        let q = LinearOp::new().with(0, Var::X, 1.0).with(2, Var::X, -1.0);
        assert_eq!(q.to_string(), "u - u_xx");
        let n = NonlinearOp::none()
            .with(1.0, vec![Factor::u(1), Factor::d(1, Var::X)])
            .with(-1.0, vec![Factor::u(1), Factor::d(2, Var::X)]);
        assert_eq!(n.to_string(), "u*u_x - u*u_xx");
        assert_eq!(
            NonlinearOp::none()
                .with(1.0, vec![Factor::u(2)])
                .to_string(),
            "u^2"
        );
    }
}
