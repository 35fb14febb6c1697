//! Canonical coefficient form: a finite sum of `c * m` where each monomial `m`
//! is a sorted product of atoms raised to positive integer powers.
//!
//! Atoms are the spatial variables plus the transcendental nodes `sin`, `cos`,
//! `exp` and real (non-natural) powers, each carrying a canonical argument.
//! Two polynomials built from the same algebraic operations compare equal
//! structurally. The one identity applied is `cos^2 = 1 - sin^2`, which keeps
//! every cosine at power at most one; other trigonometric identities are not.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::sync::Arc;

use super::SymError;

thread_local! {
    static ARGUMENTS: RefCell<BTreeMap<Poly, Arc<Poly>>> = const { RefCell::new(BTreeMap::new()) };
}

/// Shares one allocation between equal atom arguments so that most atom
/// comparisons end at a pointer check.
fn intern(arg: &Poly) -> Arc<Poly> {
    ARGUMENTS.with(|table| {
        let mut table = table.borrow_mut();
        if let Some(a) = table.get(arg) {
            return a.clone();
        }
        let a = Arc::new(arg.clone());
        table.insert(arg.clone(), a.clone());
        a
    })
}

fn same_or_cmp(a: &Arc<Poly>, b: &Arc<Poly>) -> Ordering {
    if Arc::ptr_eq(a, b) {
        Ordering::Equal
    } else {
        a.cmp(b)
    }
}

/// Relative size below which the sum of two coefficients is treated as an
/// exact cancellation.
pub const CANCEL_REL: f64 = 1e-12;

/// Natural exponents up to this bound are expanded by repeated multiplication.
const MAX_EXPANDED_POWER: f64 = 64.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X,
    Y,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
        }
    }
}

impl std::fmt::Display for Var {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A binding of the spatial variables.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point {
    pub x: Option<f64>,
    pub y: Option<f64>,
}

impl Point {
    pub fn x(x: f64) -> Self {
        Point {
            x: Some(x),
            y: None,
        }
    }

    pub fn xy(x: f64, y: f64) -> Self {
        Point {
            x: Some(x),
            y: Some(y),
        }
    }

    pub fn get(&self, var: Var) -> Result<f64, SymError> {
        match var {
            Var::X => self.x,
            Var::Y => self.y,
        }
        .ok_or(SymError::Unbound(var))
    }
}

#[derive(Clone, Debug)]
pub enum Atom {
    Var(Var),
    Sin(Arc<Poly>),
    Cos(Arc<Poly>),
    Exp(Arc<Poly>),
    /// `base^exponent` for an exponent that is not a small natural number.
    Pow(Arc<Poly>, f64),
}

impl Atom {
    fn rank(&self) -> u8 {
        match self {
            Atom::Var(_) => 0,
            Atom::Sin(_) => 1,
            Atom::Cos(_) => 2,
            Atom::Exp(_) => 3,
            Atom::Pow(..) => 4,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Atom::Var(_))
    }

    pub fn depends_on(&self, var: Var) -> bool {
        match self {
            Atom::Var(v) => *v == var,
            Atom::Sin(a) | Atom::Cos(a) | Atom::Exp(a) | Atom::Pow(a, _) => a.depends_on(var),
        }
    }

    pub fn eval(&self, point: &Point) -> Result<f64, SymError> {
        Ok(match self {
            Atom::Var(v) => point.get(*v)?,
            Atom::Sin(a) => a.eval(point)?.sin(),
            Atom::Cos(a) => a.eval(point)?.cos(),
            Atom::Exp(a) => a.eval(point)?.exp(),
            Atom::Pow(b, e) => {
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
        })
    }

    /// Derivative of the atom itself (chain rule applied).
    fn diff(&self, var: Var) -> Poly {
        match self {
            Atom::Var(v) => {
                if *v == var {
                    Poly::one()
                } else {
                    Poly::zero()
                }
            }
            Atom::Sin(a) => Poly::from_atom(Atom::Cos(a.clone())).mul(&a.diff(var)),
            Atom::Cos(a) => Poly::from_atom(Atom::Sin(a.clone()))
                .mul(&a.diff(var))
                .neg(),
            Atom::Exp(a) => Poly::from_atom(Atom::Exp(a.clone())).mul(&a.diff(var)),
            Atom::Pow(b, e) => Poly::pow_real(b, e - 1.0).mul(&b.diff(var)).scale(*e),
        }
    }

    fn subst(&self, var: Var, value: f64) -> Poly {
        match self {
            Atom::Var(v) if *v == var => Poly::constant(value),
            Atom::Var(v) => Poly::var(*v),
            Atom::Sin(a) => Poly::sin(&a.subst(var, value)),
            Atom::Cos(a) => Poly::cos(&a.subst(var, value)),
            Atom::Exp(a) => Poly::exp(&a.subst(var, value)),
            Atom::Pow(b, e) => Poly::pow_real(&b.subst(var, value), *e),
        }
    }
}

impl Ord for Atom {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank()
            .cmp(&other.rank())
            .then_with(|| match (self, other) {
                (Atom::Var(a), Atom::Var(b)) => a.cmp(b),
                (Atom::Sin(a), Atom::Sin(b))
                | (Atom::Cos(a), Atom::Cos(b))
                | (Atom::Exp(a), Atom::Exp(b)) => same_or_cmp(a, b),
                (Atom::Pow(a, p), Atom::Pow(b, q)) => {
                    p.total_cmp(q).then_with(|| same_or_cmp(a, b))
                }
                _ => Ordering::Equal,
            })
    }
}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Atom {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Atom {}

/// Sorted product of atom powers; the empty product is the unit monomial.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Monomial(Vec<(Atom, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn atom(atom: Atom) -> Self {
        Monomial(vec![(atom, 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Atom, u32)] {
        &self.0
    }

    pub fn is_polynomial(&self) -> bool {
        self.0.iter().all(|(a, _)| a.is_var())
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, k)| k).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    pub fn eval(&self, point: &Point) -> Result<f64, SymError> {
        let mut acc = 1.0;
        for (atom, k) in &self.0 {
            acc *= atom.eval(point)?.powi(*k as i32);
        }
        Ok(acc)
    }

    fn power_of(&self, atom: &Atom) -> u32 {
        self.0
            .binary_search_by(|(a, _)| a.cmp(atom))
            .map_or(0, |i| self.0[i].1)
    }

    /// Same monomial with the exponent of `atom` replaced (0 removes it).
    fn with_power(&self, atom: &Atom, power: u32) -> Monomial {
        let mut factors = self.0.clone();
        match factors.binary_search_by(|(a, _)| a.cmp(atom)) {
            Ok(i) if power == 0 => {
                factors.remove(i);
            }
            Ok(i) => factors[i].1 = power,
            Err(i) if power > 0 => factors.insert(i, (atom.clone(), power)),
            Err(_) => {}
        }
        Monomial(factors)
    }

    fn cos_excess(&self) -> Option<usize> {
        self.0
            .iter()
            .position(|(a, k)| matches!(a, Atom::Cos(_)) && *k >= 2)
    }

    fn without(&self, index: usize) -> Monomial {
        let mut factors = self.0.clone();
        if factors[index].1 > 1 {
            factors[index].1 -= 1;
        } else {
            factors.remove(index);
        }
        Monomial(factors)
    }
}

/// Canonical sum of monomials with nonzero real coefficients.
#[derive(Clone, Debug, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, f64>,
}

impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a = self.terms.iter();
        let mut b = other.terms.iter();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some((ma, ca)), Some((mb, cb))) => {
                    let ord = ma.cmp(mb).then_with(|| ca.total_cmp(cb));
                    if ord != Ordering::Equal {
                        return ord;
                    }
                }
            }
        }
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Poly {}

fn accumulate(terms: &mut BTreeMap<Monomial, f64>, m: Monomial, c: f64) {
    if c == 0.0 {
        return;
    }
    match terms.entry(m) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            let old = *e.get();
            let sum = old + c;
            if sum == 0.0 || sum.abs() <= CANCEL_REL * old.abs().max(c.abs()) {
                e.remove();
            } else {
                *e.get_mut() = sum;
            }
        }
    }
}

/// Accumulates `c * m` with every `cos(a)^k`, `k >= 2`, rewritten through
/// `cos(a)^2 = 1 - sin(a)^2`, so canonical monomials hold at most one power
/// of each cosine.
fn accumulate_reduced(terms: &mut BTreeMap<Monomial, f64>, m: Monomial, c: f64) {
    let Some(i) = m.cos_excess() else {
        accumulate(terms, m, c);
        return;
    };
    let (atom, k) = m.0[i].clone();
    let Atom::Cos(arg) = &atom else {
        unreachable!("cos_excess points at a cosine")
    };
    let sin = Atom::Sin(arg.clone());
    let base = m.with_power(&atom, k % 2);
    let s0 = base.power_of(&sin);
    let q = k / 2;
    let mut binom = 1.0;
    for j in 0..=q {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        accumulate_reduced(terms, base.with_power(&sin, s0 + 2 * j), c * sign * binom);
        binom = binom * f64::from(q - j) / f64::from(j + 1);
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(1.0)
    }

    pub fn constant(c: f64) -> Self {
        Poly::monomial(c, Monomial::one())
    }

    pub fn var(v: Var) -> Self {
        Poly::from_atom(Atom::Var(v))
    }

    pub fn from_atom(atom: Atom) -> Self {
        Poly::monomial(1.0, Monomial::atom(atom))
    }

    pub fn monomial(c: f64, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        accumulate_reduced(&mut terms, m, c);
        Poly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, f64)>>(iter: I) -> Self {
        let mut terms = BTreeMap::new();
        for (m, c) in iter {
            accumulate_reduced(&mut terms, m, c);
        }
        Poly { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> + '_ {
        self.terms.iter().map(|(m, c)| (m, *c))
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

    /// `Some(c)` when the polynomial has no non-constant monomial.
    pub fn as_constant(&self) -> Option<f64> {
        match self.terms.len() {
            0 => Some(0.0),
            1 => self.terms.get(&Monomial::one()).copied(),
            _ => None,
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(Monomial::is_polynomial)
    }

    pub fn depends_on(&self, var: Var) -> bool {
        self.terms
            .keys()
            .any(|m| m.factors().iter().any(|(a, _)| a.depends_on(var)))
    }

    pub fn coefficient(&self, m: &Monomial) -> f64 {
        self.terms.get(m).copied().unwrap_or(0.0)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().fold(0.0, |acc, c| acc.max(c.abs()))
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            accumulate(&mut terms, m.clone(), *c);
        }
        Poly { terms }
    }

    pub fn add_assign(&mut self, other: &Poly) {
        for (m, c) in &other.terms {
            accumulate(&mut self.terms, m.clone(), *c);
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        self.scale(-1.0)
    }

    pub fn scale(&self, k: f64) -> Poly {
        if k == 0.0 {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if let Some(k) = other.as_constant() {
            return self.scale(k);
        }
        if let Some(k) = self.as_constant() {
            return other.scale(k);
        }
        let mut terms = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                accumulate_reduced(&mut terms, ma.mul(mb), ca * cb);
            }
        }
        Poly { terms }
    }

    pub fn powi(&self, n: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn sin(arg: &Poly) -> Poly {
        match arg.as_constant() {
            Some(c) => Poly::constant(c.sin()),
            None => Poly::from_atom(Atom::Sin(intern(arg))),
        }
    }

    pub fn cos(arg: &Poly) -> Poly {
        match arg.as_constant() {
            Some(c) => Poly::constant(c.cos()),
            None => Poly::from_atom(Atom::Cos(intern(arg))),
        }
    }

    pub fn exp(arg: &Poly) -> Poly {
        match arg.as_constant() {
            Some(c) => Poly::constant(c.exp()),
            None => Poly::from_atom(Atom::Exp(intern(arg))),
        }
    }

    /// `base^e` for real `e`, expanded when `e` is a small natural number.
    pub fn pow_real(base: &Poly, e: f64) -> Poly {
        if e == 0.0 {
            return Poly::one();
        }
        if let Some(c) = base.as_constant() {
            return Poly::constant(c.powf(e));
        }
        if base.terms.len() == 1 {
            let (m, c) = base.terms.iter().next().unwrap();
            if *c == 1.0 && m.factors().len() == 1 && m.factors()[0].1 == 1 {
                if let Atom::Pow(inner, e1) = &m.factors()[0].0 {
                    return Poly::pow_real(inner, e1 * e);
                }
            }
        }
        if e > 0.0 && e.fract() == 0.0 && e <= MAX_EXPANDED_POWER {
            return base.powi(e as u32);
        }
        Poly::from_atom(Atom::Pow(intern(base), e))
    }

    pub fn diff(&self, var: Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            for (i, (atom, k)) in m.factors().iter().enumerate() {
                if !atom.depends_on(var) {
                    continue;
                }
                let rest = Poly::monomial(c * f64::from(*k), m.without(i));
                out.add_assign(&rest.mul(&atom.diff(var)));
            }
        }
        out
    }

    pub fn eval(&self, point: &Point) -> Result<f64, SymError> {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            acc += c * m.eval(point)?;
        }
        Ok(acc)
    }

    /// Sum of the absolute values of the monomial contributions at `point`;
    /// the natural scale for judging cancellation in [`Poly::eval`].
    pub fn eval_abs(&self, point: &Point) -> Result<f64, SymError> {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            acc += (c * m.eval(point)?).abs();
        }
        Ok(acc)
    }

    /// Substitutes a constant for one spatial variable.
    pub fn subst(&self, var: Var, value: f64) -> Poly {
        if !self.depends_on(var) {
            return self.clone();
        }
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut term = Poly::constant(*c);
            for (atom, k) in m.factors() {
                term = term.mul(&atom.subst(var, value).powi(*k));
            }
            out.add_assign(&term);
        }
        out
    }
}

impl From<f64> for Poly {
    fn from(c: f64) -> Self {
        Poly::constant(c)
    }
}

impl std::fmt::Display for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", super::Expr::from_poly(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Poly {
        Poly::var(Var::X)
    }

    #[test]
    fn expansion_collects_like_monomials() {
        // x(2 - x) = 2x - x^2
        let p = x().mul(&Poly::constant(2.0).sub(&x()));
        let expected = x().scale(2.0).sub(&x().powi(2));
        assert_eq!(p, expected);
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn cancellation_drops_terms() {
        let p = x().add(&x().neg());
        assert!(p.is_zero());
        let s = Poly::sin(&x()).scale(3.0);
        assert!(s.sub(&s).is_zero());
    }

    #[test]
    fn constants_fold_through_transcendentals() {
        assert_eq!(Poly::exp(&Poly::zero()).as_constant(), Some(1.0));
        assert_eq!(
            Poly::pow_real(&Poly::constant(4.0), 0.5).as_constant(),
            Some(2.0)
        );
    }

    #[test]
    fn derivative_of_sine_with_linear_argument() {
        let arg = x().scale(2.0 * std::f64::consts::PI);
        let d = Poly::sin(&arg).diff(Var::X);
        let expected = Poly::cos(&arg).scale(2.0 * std::f64::consts::PI);
        assert_eq!(d, expected);
    }

    #[test]
    fn substitution_folds_atoms() {
        let p = Poly::exp(&x()).add(&x().powi(2));
        let at1 = p.subst(Var::X, 1.0);
        let c = at1.as_constant().unwrap();
        assert!((c - (std::f64::consts::E + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn fractional_power_domain_error() {
        let p = Poly::pow_real(&x(), 0.5);
        assert!(p.eval(&Point::x(-1.0)).is_err());
        assert_eq!(p.eval(&Point::x(4.0)).unwrap(), 2.0);
        assert!(matches!(
            p.eval(&Point::default()),
            Err(SymError::Unbound(Var::X))
        ));
    }

    #[test]
    fn nested_real_powers_collapse() {
        let p = Poly::pow_real(&Poly::pow_real(&x(), 0.5), 4.0);
        assert_eq!(p, x().powi(2));
    }
}
