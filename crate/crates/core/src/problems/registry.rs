use super::{manufacture_source, ProblemError, ProblemSpec, SourceMode};
use crate::decomp::{BoundaryData, Factor, LinearOp, NonlinearOp};
use crate::fracterm::Series;
use crate::symx::{Domain, Interval, Var};

/// A built-in benchmark as printed: exact solution plus the stated source,
/// initial and face data.
pub struct Builtin {
    pub id: &'static str,
    pub title: &'static str,
    pub equation: &'static str,
    domain: fn() -> Domain,
    linear: fn() -> LinearOp,
    nonlinear: fn() -> NonlinearOp,
    exact: &'static str,
    source: &'static str,
    initial: &'static str,
    /// `x_lo, x_hi` in 1D, then `y_lo, y_hi` in 2D.
    faces: &'static [&'static str],
}

fn unit() -> Domain {
    Domain::line(0.0, 1.0)
}

fn lit(src: &str) -> Series {
    Series::parse(src, None).expect("built-in literal parses")
}

pub static BUILTINS: [Builtin; 7] = [
    Builtin {
        id: "p1",
        title: "reaction-diffusion on [0,2]",
        equation: "D^a u + u = u_xx + h",
        domain: || Domain::line(0.0, 2.0),
        linear: || LinearOp::new().with(0, Var::X, 1.0).with(2, Var::X, -1.0),
        nonlinear: NonlinearOp::none,
        exact: "t^2*x*(2-x)",
        source: "2/gamma(3-alpha)*x*(2-x) + 2*t^2",
        initial: "0",
        faces: &["0", "0"],
    },
    Builtin {
        id: "p2",
        title: "two-dimensional reaction-diffusion on [0,2]^2",
        equation: "D^a u + u = u_xx + u_yy + h",
        domain: || Domain::rect(Interval::new(0.0, 2.0), Interval::new(0.0, 2.0)),
        linear: || {
            LinearOp::new()
                .with(0, Var::X, 1.0)
                .with(2, Var::X, -1.0)
                .with(2, Var::Y, -1.0)
        },
        nonlinear: NonlinearOp::none,
        exact: "t^2*(x*(2-x) + y*(2-y))",
        source:
            "2/gamma(3-alpha)*t^(2-alpha)*(x*(2-x) + y*(2-y)) + t^2*(x*(2-x) + y*(2-y)) + 4*t^2",
        initial: "0",
        faces: &["t^2*y*(2-y)", "t^2*y*(2-y)", "t^2*x*(2-x)", "t^2*x*(2-x)"],
    },
    Builtin {
        id: "p3",
        title: "advection with exponential initial data",
        equation: "D^a u = u_x + h",
        domain: unit,
        linear: || LinearOp::new().with(1, Var::X, -1.0),
        nonlinear: NonlinearOp::none,
        exact: "t^3*cos(x) + exp(x)",
        source: "(6*t^(3-alpha)/gamma(4-alpha) + t^3)*cos(x) - exp(x)",
        initial: "exp(x)",
        faces: &["t^3 + 1", "t^3*cos(1) + e"],
    },
    Builtin {
        id: "p4",
        title: "advection-diffusion with order-dependent solution",
        equation: "D^a u + u_x + u_xx = h",
        domain: unit,
        linear: || LinearOp::new().with(1, Var::X, 1.0).with(2, Var::X, 1.0),
        nonlinear: NonlinearOp::none,
        exact: "t^(3+alpha)*sin(x) + 1",
        source: "(1/6*gamma(4+alpha)*t^3 + t^(3+alpha))*sin(x)",
        initial: "x^2",
        faces: &["1", "t^(3+alpha)*sin(1) + 1"],
    },
    Builtin {
        id: "p5",
        title: "advection with zero initial data",
        equation: "D^a u + u_x = h",
        domain: unit,
        linear: || LinearOp::new().with(1, Var::X, 1.0),
        nonlinear: NonlinearOp::none,
        exact: "t*sin(x)",
        source: "t^(1-alpha)*sin(x)/gamma(2-alpha) + t*cos(x)",
        initial: "0",
        faces: &["0", "t*sin(1)"],
    },
    Builtin {
        id: "p6",
        title: "quadratic reaction",
        equation: "D^a u + u^2 = h",
        domain: unit,
        linear: LinearOp::new,
        nonlinear: || NonlinearOp::none().with(1.0, vec![Factor::u(2)]),
        exact: "x^2*t^2",
        source: "x^2*(2*t^(2-alpha)/gamma(3-alpha) + x^2*t^4)",
        initial: "0",
        faces: &["0", "t^2"],
    },
    Builtin {
        id: "p7",
        title: "nonlinear transport with a time-dependent reaction",
        equation: "D^a u + u*u_x - u*u_xx = h + 4*pi^2*t^2*sin(2*pi*x)*u",
        domain: unit,
        linear: || LinearOp::new().with_series(0, Var::X, lit("-4*pi^2*t^2*sin(2*pi*x)")),
        nonlinear: || {
            NonlinearOp::none()
                .with(1.0, vec![Factor::u(1), Factor::d(1, Var::X)])
                .with(-1.0, vec![Factor::u(1), Factor::d(2, Var::X)])
        },
        exact: "t^2*sin(2*pi*x)",
        source: "2*t*sin(2*pi*x) + 2*pi*t^4*sin(2*pi*x)*cos(2*pi*x)",
        initial: "0",
        faces: &["0", "0"],
    },
];

pub fn builtin_ids() -> impl Iterator<Item = &'static str> {
    BUILTINS.iter().map(|b| b.id)
}

pub fn builtin_def(id: &str) -> Result<&'static Builtin, ProblemError> {
    BUILTINS
        .iter()
        .find(|b| b.id == id)
        .ok_or_else(|| ProblemError::UnknownProblem(id.to_string()))
}

impl Builtin {
    pub fn domain(&self) -> Domain {
        (self.domain)()
    }

    pub fn linear(&self) -> LinearOp {
        (self.linear)()
    }

    pub fn nonlinear(&self) -> NonlinearOp {
        (self.nonlinear)()
    }

    pub fn exact(&self, alpha: f64) -> Series {
        Series::parse(self.exact, Some(alpha)).expect("built-in literal parses")
    }

    fn printed(&self, src: &str, alpha: f64) -> Series {
        Series::parse(src, Some(alpha)).expect("built-in literal parses")
    }

    fn printed_boundary(&self, alpha: f64) -> BoundaryData {
        let f: Vec<Series> = self.faces.iter().map(|s| self.printed(s, alpha)).collect();
        match f.as_slice() {
            [lo, hi] => BoundaryData::line(lo.clone(), hi.clone()),
            [xl, xh, yl, yh] => BoundaryData::rect(xl.clone(), xh.clone(), yl.clone(), yh.clone()),
            _ => unreachable!("one or two dimensions"),
        }
    }
}

pub fn builtin(id: &str, alpha: f64, mode: SourceMode) -> Result<ProblemSpec, ProblemError> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(ProblemError::Alpha(alpha));
    }
    let def = builtin_def(id)?;
    let domain = def.domain();
    let linear = def.linear();
    let nonlinear = def.nonlinear();
    let (source, initial, boundary, exact) = match mode {
        SourceMode::PaperLiteral => {
            let ic = def.printed(def.initial, alpha).initial_value();
            (
                def.printed(def.source, alpha),
                ic,
                def.printed_boundary(alpha),
                def.exact(alpha),
            )
        }
        SourceMode::Manufactured | SourceMode::Frozen => {
            let a_ref = if mode == SourceMode::Frozen {
                1.0
            } else {
                alpha
            };
            let exact = def.exact(a_ref);
            let h = manufacture_source(&exact, &linear, &nonlinear, a_ref)?;
            let bd = BoundaryData::trace(&exact, &domain);
            (h, exact.initial_value(), bd, exact)
        }
    };
    Ok(ProblemSpec {
        id: def.id.to_string(),
        alpha,
        domain,
        initial,
        boundary: Some(boundary),
        linear,
        nonlinear,
        source,
        exact: Some(exact),
        source_mode: mode,
    })
}
