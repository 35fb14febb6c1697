//! Spatial expressions: trees, canonical coefficient form, parsing and
//! sampling-based comparison.

mod expr;
mod parse;
mod poly;
mod sample;

pub use expr::Expr;
pub use parse::{parse, parse_expr, Ast, AstKind, Func, ParseError};
pub use poly::{Atom, Monomial, Point, Poly, Var, CANCEL_REL};
pub use sample::{
    equal_sampled, is_cancelled_zero, poly_equal_sampled, sample_points, Domain, Interval,
};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SymError {
    #[error("variable {0} is not bound")]
    Unbound(Var),
    #[error("domain error: {0}")]
    Domain(String),
}
