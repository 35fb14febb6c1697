use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::poly::{Atom, Monomial, Point, Poly, Var};
use super::SymError;

/// Spatial expression tree.
///
/// Trees are what users write and what gets printed. All algebra goes
/// through [`Poly`], and [`Expr::simplify`] is the round trip
/// `Expr -> Poly -> Expr`.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, f64),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
}

impl Expr {
    pub fn x() -> Expr {
        Expr::Var(Var::X)
    }

    pub fn y() -> Expr {
        Expr::Var(Var::Y)
    }

    pub fn c(v: f64) -> Expr {
        Expr::Const(v)
    }

    pub fn sin(self) -> Expr {
        Expr::Sin(Box::new(self))
    }

    pub fn cos(self) -> Expr {
        Expr::Cos(Box::new(self))
    }

    pub fn exp(self) -> Expr {
        Expr::Exp(Box::new(self))
    }

    pub fn pow(self, e: f64) -> Expr {
        Expr::Pow(Box::new(self), e)
    }

    pub fn to_poly(&self) -> Poly {
        match self {
            Expr::Const(c) => Poly::constant(*c),
            Expr::Var(v) => Poly::var(*v),
            Expr::Sum(items) => items.iter().fold(Poly::zero(), |mut acc, e| {
                acc.add_assign(&e.to_poly());
                acc
            }),
            Expr::Product(items) => items
                .iter()
                .fold(Poly::one(), |acc, e| acc.mul(&e.to_poly())),
            Expr::Pow(b, e) => Poly::pow_real(&b.to_poly(), *e),
            Expr::Sin(a) => Poly::sin(&a.to_poly()),
            Expr::Cos(a) => Poly::cos(&a.to_poly()),
            Expr::Exp(a) => Poly::exp(&a.to_poly()),
        }
    }

    pub fn from_poly(p: &Poly) -> Expr {
        let mut summands: Vec<Expr> = p.terms().map(|(m, c)| monomial_expr(m, c)).collect();
        match summands.len() {
            0 => Expr::Const(0.0),
            1 => summands.pop().unwrap(),
            _ => Expr::Sum(summands),
        }
    }

    /// Constant folding, flattening, expansion and collection of like
    /// monomials. Idempotent.
    pub fn simplify(&self) -> Expr {
        Expr::from_poly(&self.to_poly())
    }

    /// Symbolic derivative, simplified.
    pub fn diff(&self, var: Var) -> Expr {
        self.diff_raw(var).simplify()
    }

    fn diff_raw(&self, var: Var) -> Expr {
        match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::Var(v) => Expr::Const(if *v == var { 1.0 } else { 0.0 }),
            Expr::Sum(items) => Expr::Sum(items.iter().map(|e| e.diff_raw(var)).collect()),
            Expr::Product(items) => {
                let mut summands = Vec::with_capacity(items.len());
                for i in 0..items.len() {
                    let mut factors = items.clone();
                    factors[i] = items[i].diff_raw(var);
                    summands.push(Expr::Product(factors));
                }
                Expr::Sum(summands)
            }
            Expr::Pow(b, e) => Expr::Product(vec![
                Expr::Const(*e),
                Expr::Pow(b.clone(), e - 1.0),
                b.diff_raw(var),
            ]),
            Expr::Sin(a) => Expr::Product(vec![Expr::Cos(a.clone()), a.diff_raw(var)]),
            Expr::Cos(a) => Expr::Product(vec![
                Expr::Const(-1.0),
                Expr::Sin(a.clone()),
                a.diff_raw(var),
            ]),
            Expr::Exp(a) => Expr::Product(vec![Expr::Exp(a.clone()), a.diff_raw(var)]),
        }
    }

    pub fn eval(&self, point: &Point) -> Result<f64, SymError> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var(v) => point.get(*v)?,
            Expr::Sum(items) => {
                let mut acc = 0.0;
                for e in items {
                    acc += e.eval(point)?;
                }
                acc
            }
            Expr::Product(items) => {
                let mut acc = 1.0;
                for e in items {
                    acc *= e.eval(point)?;
                }
                acc
            }
            Expr::Pow(b, e) => {
                let base = b.eval(point)?;
                if base < 0.0 && e.fract() != 0.0 {
                    return Err(SymError::Domain(format!(
                        "negative base {base} raised to fractional power {e}"
                    )));
                }
                if base == 0.0 && *e < 0.0 {
                    return Err(SymError::Domain(format!(
                        "zero raised to negative power {e}"
                    )));
                }
                base.powf(*e)
            }
            Expr::Sin(a) => a.eval(point)?.sin(),
            Expr::Cos(a) => a.eval(point)?.cos(),
            Expr::Exp(a) => a.eval(point)?.exp(),
        })
    }

    fn is_negative_product(&self) -> bool {
        match self {
            Expr::Const(c) => *c < 0.0,
            Expr::Product(items) => matches!(items.first(), Some(Expr::Const(c)) if *c < 0.0),
            _ => false,
        }
    }
}

fn atom_expr(atom: &Atom) -> Expr {
    match atom {
        Atom::Var(v) => Expr::Var(*v),
        Atom::Sin(a) => Expr::Sin(Box::new(Expr::from_poly(a))),
        Atom::Cos(a) => Expr::Cos(Box::new(Expr::from_poly(a))),
        Atom::Exp(a) => Expr::Exp(Box::new(Expr::from_poly(a))),
        Atom::Pow(b, e) => Expr::Pow(Box::new(Expr::from_poly(b)), *e),
    }
}

fn monomial_expr(m: &Monomial, c: f64) -> Expr {
    let mut factors: Vec<Expr> = Vec::with_capacity(m.factors().len() + 1);
    if m.is_one() || c != 1.0 {
        factors.push(Expr::Const(c));
    }
    for (atom, k) in m.factors() {
        let base = atom_expr(atom);
        factors.push(if *k == 1 {
            base
        } else {
            Expr::Pow(Box::new(base), f64::from(*k))
        });
    }
    if factors.len() == 1 {
        factors.pop().unwrap()
    } else {
        Expr::Product(factors)
    }
}

fn fmt_num(f: &mut fmt::Formatter<'_>, c: f64) -> fmt::Result {
    if c == std::f64::consts::PI {
        f.write_str("pi")
    } else {
        write!(f, "{c}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if *c < 0.0 => {
                f.write_str("-")?;
                fmt_num(f, -c)
            }
            Expr::Const(c) => fmt_num(f, *c),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Sum(items) => {
                for (i, e) in items.iter().enumerate() {
                    if i == 0 {
                        write!(f, "{e}")?;
                    } else if e.is_negative_product() {
                        write!(f, " - {}", NegatedTerm(e))?;
                    } else {
                        write!(f, " + {e}")?;
                    }
                }
                Ok(())
            }
            Expr::Product(items) => {
                let mut first = true;
                for (i, e) in items.iter().enumerate() {
                    if i == 0 {
                        if let Expr::Const(c) = e {
                            if *c == -1.0 && items.len() > 1 {
                                f.write_str("-")?;
                                continue;
                            }
                        }
                    }
                    if !first {
                        f.write_str("*")?;
                    }
                    first = false;
                    match e {
                        Expr::Sum(_) => write!(f, "({e})")?,
                        Expr::Const(c) if *c < 0.0 && i > 0 => write!(f, "({e})")?,
                        _ => write!(f, "{e}")?,
                    }
                }
                Ok(())
            }
            Expr::Pow(b, e) => {
                match **b {
                    Expr::Var(_) | Expr::Sin(_) | Expr::Cos(_) | Expr::Exp(_) => write!(f, "{b}")?,
                    Expr::Const(c) if c >= 0.0 => write!(f, "{b}")?,
                    _ => write!(f, "({b})")?,
                }
                if *e < 0.0 {
                    write!(f, "^({e})")
                } else {
                    write!(f, "^{e}")
                }
            }
            Expr::Sin(a) => write!(f, "sin({a})"),
            Expr::Cos(a) => write!(f, "cos({a})"),
            Expr::Exp(a) => write!(f, "exp({a})"),
        }
    }
}

/// Prints a negative product without its sign, for `a - b` rendering.
struct NegatedTerm<'a>(&'a Expr);

impl fmt::Display for NegatedTerm<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Expr::Const(c) => fmt_num(f, -c),
            Expr::Product(items) => {
                let mut rest: Vec<Expr> = items.clone();
                if let Some(Expr::Const(c)) = rest.first_mut() {
                    *c = -*c;
                    if *c == 1.0 && items.len() > 1 {
                        rest.remove(0);
                    }
                }
                let e = if rest.len() == 1 {
                    rest.pop().unwrap()
                } else {
                    Expr::Product(rest)
                };
                write!(f, "{e}")
            }
            e => write!(f, "{e}"),
        }
    }
}

impl From<f64> for Expr {
    fn from(c: f64) -> Self {
        Expr::Const(c)
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Sum(vec![self, rhs])
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Sum(vec![self, -rhs])
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Product(vec![self, rhs])
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Product(vec![Expr::Const(-1.0), self])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn two_x_minus_x2() -> Expr {
        Expr::x() * (Expr::c(2.0) - Expr::x())
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        assert_eq!(Expr::c(5.0).diff(Var::X), Expr::Const(0.0));
    }

    #[test]
    fn derivative_of_quadratic_factor() {
        let d = two_x_minus_x2().diff(Var::X);
        let expected = (Expr::c(2.0) - Expr::c(2.0) * Expr::x()).simplify();
        assert_eq!(d, expected);
    }

    #[test]
    fn derivative_of_sine_chain_rule() {
        let arg = Expr::c(2.0 * PI) * Expr::x();
        let d = arg.clone().sin().diff(Var::X);
        let expected = (Expr::c(2.0 * PI) * arg.cos()).simplify();
        assert_eq!(d, expected);
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(two_x_minus_x2().eval(&Point::x(1.0)).unwrap(), 1.0);
        assert_eq!(Expr::x().exp().eval(&Point::x(0.0)).unwrap(), 1.0);
        let s = (Expr::c(2.0 * PI) * Expr::x()).sin();
        assert!((s.eval(&Point::x(0.25)).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            Expr::y().eval(&Point::x(1.0)),
            Err(SymError::Unbound(Var::Y))
        ));
        assert!(matches!(
            Expr::x().pow(0.5).eval(&Point::x(-2.0)),
            Err(SymError::Domain(_))
        ));
    }

    #[test]
    fn simplify_examples() {
        let e = Expr::c(0.0) * Expr::x().sin() + Expr::x();
        assert_eq!(e.simplify(), Expr::x());
        let collected = two_x_minus_x2().simplify();
        assert_eq!(
            collected,
            Expr::Sum(vec![
                Expr::Product(vec![Expr::c(2.0), Expr::x()]),
                Expr::Product(vec![Expr::c(-1.0), Expr::Pow(Box::new(Expr::x()), 2.0)]),
            ])
        );
        assert_eq!(collected.to_string(), "2*x - x^2");
        let unit = Expr::c(1.0) * Expr::x().exp();
        assert_eq!(unit.simplify(), Expr::x().exp());
    }

    #[test]
    fn simplify_is_idempotent_on_mixed_trees() {
        let e = (Expr::x().pow(0.5) + Expr::c(3.0)) * (Expr::x() * Expr::c(2.0)).cos()
            - Expr::y().exp() * Expr::x();
        let once = e.simplify();
        assert_eq!(once.simplify(), once);
    }
}
