//! Infix grammar shared by problem files and the CLI.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := ('-' | '+') unary | power
//! power := atom ('^' unary)?
//! atom  := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! Identifiers: `x`, `y`, `t`, `alpha`, `pi`, `e`; functions `sin`, `cos`,
//! `exp` and `gamma` (constant arguments only).

use std::fmt;

use super::expr::Expr;
use crate::fracterm::gamma;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("column {column}: {message}")]
pub struct ParseError {
    /// 1-based character column.
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(pos: usize, message: impl Into<String>) -> Self {
        ParseError {
            column: pos + 1,
            message: message.into(),
        }
    }

    /// Source line with a caret under the offending column.
    pub fn annotate(&self, source: &str) -> String {
        format!("{source}\n{:>width$}\n{self}", "^", width = self.column)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Gamma,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AstKind {
    Num(f64),
    X,
    Y,
    T,
    Alpha,
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, Box<Ast>),
    Call(Func, Box<Ast>),
}

/// Parsed expression over `x`, `y`, `t` and `alpha`, with source positions.
#[derive(Clone, Debug, PartialEq)]
pub struct Ast {
    pub kind: AstKind,
    pub pos: usize,
}

impl Ast {
    fn new(kind: AstKind, pos: usize) -> Self {
        Ast { kind, pos }
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.pos, message)
    }

    /// Folds the expression to a number, if it uses no variables other than
    /// `alpha` (which must then be supplied).
    pub fn const_value(&self, alpha: Option<f64>) -> Result<Option<f64>, ParseError> {
        use AstKind::*;
        let bin = |a: &Ast, b: &Ast| -> Result<Option<(f64, f64)>, ParseError> {
            Ok(match (a.const_value(alpha)?, b.const_value(alpha)?) {
                (Some(x), Some(y)) => Some((x, y)),
                _ => None,
            })
        };
        Ok(match &self.kind {
            Num(v) => Some(*v),
            X | Y | T => None,
            Alpha => Some(alpha.ok_or_else(|| self.error("alpha is not bound here"))?),
            Neg(a) => a.const_value(alpha)?.map(|v| -v),
            Add(a, b) => bin(a, b)?.map(|(x, y)| x + y),
            Sub(a, b) => bin(a, b)?.map(|(x, y)| x - y),
            Mul(a, b) => bin(a, b)?.map(|(x, y)| x * y),
            Div(a, b) => match bin(a, b)? {
                Some((_, 0.0)) => return Err(b.error("division by zero")),
                other => other.map(|(x, y)| x / y),
            },
            Pow(a, b) => bin(a, b)?.map(|(x, y)| x.powf(y)),
            Call(func, a) => match a.const_value(alpha)? {
                None if *func == Func::Gamma => {
                    return Err(a.error("gamma accepts constant arguments only"))
                }
                None => None,
                Some(v) => Some(match func {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Gamma => gamma(v).map_err(|e| a.error(e.to_string()))?,
                }),
            },
        })
    }

    /// Converts to a time-free spatial expression.
    pub fn to_expr(&self, alpha: Option<f64>) -> Result<Expr, ParseError> {
        use AstKind::*;
        if let Some(v) = self.const_value(alpha)? {
            return Ok(Expr::Const(v));
        }
        Ok(match &self.kind {
            Num(_) | Alpha => unreachable!("folded above"),
            X => Expr::x(),
            Y => Expr::y(),
            T => return Err(self.error("time variable t is not allowed in a spatial expression")),
            Neg(a) => -a.to_expr(alpha)?,
            Add(a, b) => a.to_expr(alpha)? + b.to_expr(alpha)?,
            Sub(a, b) => a.to_expr(alpha)? - b.to_expr(alpha)?,
            Mul(a, b) => a.to_expr(alpha)? * b.to_expr(alpha)?,
            Div(a, b) => a.to_expr(alpha)? * b.to_expr(alpha)?.pow(-1.0),
            Pow(a, b) => {
                let e = b
                    .const_value(alpha)?
                    .ok_or_else(|| b.error("exponent must be constant"))?;
                a.to_expr(alpha)?.pow(e)
            }
            Call(Func::Sin, a) => a.to_expr(alpha)?.sin(),
            Call(Func::Cos, a) => a.to_expr(alpha)?.cos(),
            Call(Func::Exp, a) => a.to_expr(alpha)?.exp(),
            Call(Func::Gamma, _) => unreachable!("gamma always folds or errors"),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse::<f64>()
                .map_err(|_| ParseError::new(start, format!("malformed number '{text}'")))?;
            out.push((Tok::Num(v), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), start));
        } else {
            let tok = match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => {
                    return Err(ParseError::new(
                        start,
                        format!("unexpected character '{c}'"),
                    ))
                }
            };
            out.push((tok, start));
            i += 1;
        }
    }
    out.push((Tok::End, chars.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.term()?;
        while let Tok::Op(op @ ('+' | '-')) = *self.peek() {
            let (_, pos) = self.bump();
            let rhs = self.term()?;
            let kind = if op == '+' {
                AstKind::Add(Box::new(lhs), Box::new(rhs))
            } else {
                AstKind::Sub(Box::new(lhs), Box::new(rhs))
            };
            lhs = Ast::new(kind, pos);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.unary()?;
        while let Tok::Op(op @ ('*' | '/')) = *self.peek() {
            let (_, pos) = self.bump();
            let rhs = self.unary()?;
            let kind = if op == '*' {
                AstKind::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                AstKind::Div(Box::new(lhs), Box::new(rhs))
            };
            lhs = Ast::new(kind, pos);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Ast, ParseError> {
        match *self.peek() {
            Tok::Op('-') => {
                let (_, pos) = self.bump();
                let inner = self.unary()?;
                Ok(Ast::new(AstKind::Neg(Box::new(inner)), pos))
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Ast, ParseError> {
        let base = self.atom()?;
        if let Tok::Op('^') = self.peek() {
            let (_, pos) = self.bump();
            let exponent = self.unary()?;
            return Ok(Ast::new(
                AstKind::Pow(Box::new(base), Box::new(exponent)),
                pos,
            ));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Ast, ParseError> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Ast::new(AstKind::Num(v), pos)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect_rparen(pos)?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let func = match name.as_str() {
                    "sin" => Some(Func::Sin),
                    "cos" => Some(Func::Cos),
                    "exp" => Some(Func::Exp),
                    "gamma" => Some(Func::Gamma),
                    _ => None,
                };
                if let Some(func) = func {
                    if *self.peek() != Tok::LParen {
                        return Err(ParseError::new(
                            self.pos(),
                            format!("expected '(' after {name}"),
                        ));
                    }
                    let (_, open) = self.bump();
                    let arg = self.expr()?;
                    self.expect_rparen(open)?;
                    return Ok(Ast::new(AstKind::Call(func, Box::new(arg)), pos));
                }
                let kind = match name.as_str() {
                    "x" => AstKind::X,
                    "y" => AstKind::Y,
                    "t" => AstKind::T,
                    "alpha" => AstKind::Alpha,
                    "pi" => AstKind::Num(std::f64::consts::PI),
                    "e" => AstKind::Num(std::f64::consts::E),
                    _ => return Err(ParseError::new(pos, format!("unknown identifier '{name}'"))),
                };
                Ok(Ast::new(kind, pos))
            }
            Tok::End => Err(ParseError::new(pos, "unexpected end of input")),
            Tok::Op(c) => Err(ParseError::new(pos, format!("unexpected operator '{c}'"))),
            Tok::RParen => Err(ParseError::new(pos, "unexpected ')'")),
        }
    }

    fn expect_rparen(&mut self, open: usize) -> Result<(), ParseError> {
        match self.peek() {
            Tok::RParen => {
                self.bump();
                Ok(())
            }
            _ => Err(ParseError::new(
                self.pos(),
                format!("expected ')' to close '(' at column {}", open + 1),
            )),
        }
    }
}

pub fn parse(src: &str) -> Result<Ast, ParseError> {
    let mut p = Parser {
        toks: tokenize(src)?,
        at: 0,
    };
    let ast = p.expr()?;
    match p.peek() {
        Tok::End => Ok(ast),
        _ => Err(ParseError::new(p.pos(), "unexpected trailing input")),
    }
}

/// Parses a time-free spatial expression.
pub fn parse_expr(src: &str, alpha: Option<f64>) -> Result<Expr, ParseError> {
    parse(src)?.to_expr(alpha)
}

impl fmt::Display for Func {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Gamma => "gamma",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symx::{Point, Var};

    #[test]
    fn precedence_and_associativity() {
        let e = parse_expr("1 + 2*x^2 - -x", None).unwrap();
        assert_eq!(e.eval(&Point::x(3.0)).unwrap(), 1.0 + 18.0 + 3.0);
        let e = parse_expr("2^3^2", None).unwrap();
        assert_eq!(e.eval(&Point::default()).unwrap(), 512.0);
        let e = parse_expr("-x^2", None).unwrap();
        assert_eq!(e.eval(&Point::x(3.0)).unwrap(), -9.0);
    }

    #[test]
    fn alpha_dependent_constants_fold() {
        let e = parse_expr("2/gamma(3-alpha)", Some(1.0)).unwrap();
        assert_eq!(e, Expr::Const(2.0));
        let e = parse_expr("gamma(4+alpha)/6 * sin(x)", Some(0.0)).unwrap();
        assert!((e.eval(&Point::x(1.0)).unwrap() - 1f64.sin()).abs() < 1e-13);
    }

    #[test]
    fn errors_carry_columns() {
        let err = parse_expr("sin(x) + * 2", None).unwrap_err();
        assert_eq!(err.column, 10);
        let err = parse_expr("gamma(x)", None).unwrap_err();
        assert!(err.message.contains("constant"));
        assert_eq!(err.column, 7);
        let err = parse_expr("x + t", None).unwrap_err();
        assert_eq!(err.column, 5);
        let err = parse_expr("(x + 1", None).unwrap_err();
        assert!(err.message.contains("close"));
        let err = parse_expr("foo(x)", None).unwrap_err();
        assert_eq!(err.column, 1);
        assert!(err.annotate("foo(x)").contains('^'));
    }

    #[test]
    fn display_round_trips_through_parser() {
        for src in [
            "x*(2-x)",
            "sin(2*pi*x)*cos(2*pi*x) - 3*x^4",
            "exp(x) - 1.5*x^0.5",
            "x^(-1) + y^2",
        ] {
            let e = parse_expr(src, None).unwrap().simplify();
            let again = parse_expr(&e.to_string(), None).unwrap().simplify();
            assert_eq!(e, again, "{src} -> {e}");
        }
        let _ = Var::X;
    }
}
