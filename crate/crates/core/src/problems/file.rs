//! TOML problem files.
//!
//! ```toml
//! id = "transport"
//! alpha = 0.8
//! dimension = 1
//! domain = [0.0, 1.0]
//! exact = "t*sin(x)"
//! linear = ["1x:1"]
//! nonlinear = []
//!
//! [bc]
//! left = "0"
//! right = "t*sin(1)"
//! ```
//!
//! `linear` entries are `order[var]:coefficient`, the coefficient being any
//! expression in `x`, `y`, `t`. `nonlinear` entries are products such as
//! `u^2`, `u*u_x` or `-0.5*u*u_yy`. With `exact` alone the source and the
//! initial/boundary data are manufactured; `source`, `ic` and `bc` given
//! explicitly are used as written.

use serde::Deserialize;

use super::{manufacture_source, ProblemError, ProblemSpec, SourceMode};
use crate::decomp::{BoundaryData, Factor, LinearOp, NonlinearOp};
use crate::fracterm::Series;
use crate::symx::{Domain, Interval, Var};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct BcTable {
    left: Option<String>,
    right: Option<String>,
    x0: Option<String>,
    x1: Option<String>,
    y0: Option<String>,
    y1: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    id: Option<String>,
    alpha: Option<f64>,
    dimension: Option<usize>,
    domain: Vec<f64>,
    domain_y: Option<Vec<f64>>,
    exact: Option<String>,
    source: Option<String>,
    ic: Option<String>,
    bc: Option<BcTable>,
    #[serde(default)]
    linear: Vec<String>,
    #[serde(default)]
    nonlinear: Vec<String>,
}

fn expr(field: &str, src: &str, alpha: f64) -> Result<Series, ProblemError> {
    Series::parse(src, Some(alpha)).map_err(|error| ProblemError::Expr {
        field: field.to_string(),
        text: src.to_string(),
        error,
    })
}

fn interval(field: &str, v: &[f64]) -> Result<Interval, ProblemError> {
    match v {
        [lo, hi] if lo < hi && lo.is_finite() && hi.is_finite() => Ok(Interval::new(*lo, *hi)),
        _ => Err(ProblemError::Invalid(format!(
            "{field} must be [lo, hi] with lo < hi"
        ))),
    }
}

fn derivative(spec: &str) -> Option<(u8, Var)> {
    match spec {
        "u" => Some((0, Var::X)),
        "u_x" => Some((1, Var::X)),
        "u_xx" => Some((2, Var::X)),
        "u_y" => Some((1, Var::Y)),
        "u_yy" => Some((2, Var::Y)),
        _ => None,
    }
}

fn parse_linear(entry: &str, alpha: f64) -> Result<(u8, Var, Series), ProblemError> {
    let bad = || {
        ProblemError::Invalid(format!(
            "linear term `{entry}`: expected order[var]:coefficient"
        ))
    };
    let (head, coeff) = entry.split_once(':').ok_or_else(bad)?;
    let head = head.trim();
    let (digits, var) = match head.char_indices().find(|(_, c)| !c.is_ascii_digit()) {
        Some((i, _)) => (&head[..i], &head[i..]),
        None => (head, ""),
    };
    let order: u8 = digits.parse().map_err(|_| bad())?;
    let var = match var {
        "" | "x" => Var::X,
        "y" => Var::Y,
        _ => return Err(bad()),
    };
    let coeff = expr("linear", coeff.trim(), alpha)?;
    Ok((order, var, coeff))
}

fn parse_product(entry: &str) -> Result<(f64, Vec<Factor>), ProblemError> {
    let bad = |why: &str| ProblemError::Invalid(format!("nonlinear term `{entry}`: {why}"));
    let mut s = entry.trim();
    let mut coeff = 1.0;
    if let Some(rest) = s.strip_prefix('-') {
        coeff = -1.0;
        s = rest.trim_start();
    } else if let Some(rest) = s.strip_prefix('+') {
        s = rest.trim_start();
    }
    let mut factors = Vec::new();
    for part in s.split('*').map(str::trim) {
        if part.is_empty() {
            return Err(bad("empty factor"));
        }
        if let Ok(c) = part.parse::<f64>() {
            coeff *= c;
            continue;
        }
        let (base, power) = match part.split_once('^') {
            Some((b, p)) => (
                b.trim(),
                p.trim()
                    .parse::<u32>()
                    .map_err(|_| bad("power must be a positive integer"))?,
            ),
            None => (part, 1),
        };
        if power == 0 {
            return Err(bad("power must be a positive integer"));
        }
        let (order, var) = derivative(base).ok_or_else(|| bad("unknown factor"))?;
        factors.push(Factor { order, var, power });
    }
    if factors.is_empty() {
        return Err(bad("no factor of u"));
    }
    Ok((coeff, factors))
}

/// Parses a problem file. `alpha` overrides the order stated in the file.
pub fn parse_problem_file(text: &str, alpha: Option<f64>) -> Result<ProblemSpec, ProblemError> {
    let file: ProblemFile = toml::from_str(text).map_err(|e| ProblemError::Toml(e.to_string()))?;
    let alpha = alpha
        .or(file.alpha)
        .ok_or_else(|| ProblemError::Invalid("alpha is not set".into()))?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(ProblemError::Alpha(alpha));
    }
    let x = interval("domain", &file.domain)?;
    let domain = match (&file.domain_y, file.dimension) {
        (Some(y), None | Some(2)) => Domain::rect(x, interval("domain_y", y)?),
        (None, Some(2)) => Domain::rect(x, x),
        (None, None | Some(1)) => Domain { x, y: None },
        _ => {
            return Err(ProblemError::Invalid(
                "dimension must be 1 or 2 and match the domain".into(),
            ))
        }
    };

    let mut linear = LinearOp::new();
    for entry in &file.linear {
        let (order, var, coeff) = parse_linear(entry, alpha)?;
        linear = linear.with_series(order, var, coeff);
    }
    let mut nonlinear = NonlinearOp::none();
    for entry in &file.nonlinear {
        let (coeff, factors) = parse_product(entry)?;
        nonlinear = nonlinear.with(coeff, factors);
    }
    if domain.y.is_none()
        && (linear.terms.iter().any(|t| t.var == Var::Y && t.order > 0)
            || nonlinear
                .derivatives()
                .iter()
                .any(|(o, v)| *v == Var::Y && *o > 0))
    {
        return Err(ProblemError::Invalid(
            "y-derivative in a one-dimensional problem".into(),
        ));
    }

    let exact = file
        .exact
        .as_deref()
        .map(|s| expr("exact", s, alpha))
        .transpose()?;
    let source = match (&file.source, &exact) {
        (Some(s), _) => expr("source", s, alpha)?,
        (None, Some(e)) => manufacture_source(e, &linear, &nonlinear, alpha)?,
        (None, None) => {
            return Err(ProblemError::Invalid(
                "either exact or source is required".into(),
            ))
        }
    };
    let initial = match (&file.ic, &exact) {
        (Some(s), _) => expr("ic", s, alpha)?.initial_value(),
        (None, Some(e)) => e.initial_value(),
        (None, None) => return Err(ProblemError::Invalid("ic is required without exact".into())),
    };
    let boundary = boundary_data(file.bc.as_ref(), exact.as_ref(), &domain, alpha)?;
    let literal = file.source.is_some() || file.ic.is_some() || file.bc.is_some();
    Ok(ProblemSpec {
        id: file.id.unwrap_or_else(|| "custom".to_string()),
        alpha,
        domain,
        initial,
        boundary,
        linear,
        nonlinear,
        source,
        exact,
        source_mode: if literal {
            SourceMode::PaperLiteral
        } else {
            SourceMode::Manufactured
        },
    })
}

fn boundary_data(
    bc: Option<&BcTable>,
    exact: Option<&Series>,
    domain: &Domain,
    alpha: f64,
) -> Result<Option<BoundaryData>, ProblemError> {
    let Some(bc) = bc else {
        return Ok(exact.map(|e| BoundaryData::trace(e, domain)));
    };
    let get = |name: &str, v: &Option<String>| -> Result<Series, ProblemError> {
        match v {
            Some(s) => expr(&format!("bc.{name}"), s, alpha),
            None => Err(ProblemError::Invalid(format!("bc.{name} is missing"))),
        }
    };
    let pick = |a: &'static str, av: &Option<String>, b: &'static str, bv: &Option<String>| {
        if av.is_some() {
            get(a, av)
        } else {
            get(b, bv)
        }
    };
    let x_lo = pick("left", &bc.left, "x0", &bc.x0)?;
    let x_hi = pick("right", &bc.right, "x1", &bc.x1)?;
    Ok(Some(if domain.y.is_some() {
        BoundaryData::rect(x_lo, x_hi, get("y0", &bc.y0)?, get("y1", &bc.y1)?)
    } else {
        BoundaryData::line(x_lo, x_hi)
    }))
}
