//! The oracle and invariant suite behind `fracdecomp verify`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use fracdecomp::decomp::{
    adomian_polys, ladm_solve, mldm_solve, Factor, NonlinearOp, SolveOptions, SolveTrace,
};
use fracdecomp::eval::{grid_error, residual, rl_integral_quadrature, Grid};
use fracdecomp::fracterm::{gamma, FracError, Series, SeriesCaps, TimeTerm};
use fracdecomp::problems::{
    builtin, builtin_ids, validate_consistency, CheckKind, ProblemSpec, SourceMode,
};
use fracdecomp::symx::{poly_equal_sampled, sample_points, Domain, Point, Poly, Var};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{MethodChoice, RunConfig};
use crate::solve::cmd_solve;

pub type GammaFn = fn(f64) -> Result<f64, FracError>;

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Relative agreement required between the fractional-integral power
    /// rule and the quadrature oracle.
    pub quad_tol: f64,
    /// Gamma implementation under test.
    pub gamma: GammaFn,
    /// Run only checks whose name contains this string.
    pub only: Option<String>,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            quad_tol: 1e-8,
            gamma,
            only: None,
            seed: 20240917,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

type CheckResult = Result<(bool, String), String>;
type CheckFn = fn(&VerifyOptions) -> CheckResult;

pub const CHECKS: [(&str, CheckFn); 11] = [
    ("gamma", check_gamma),
    ("power-rule", check_power_rule),
    ("semigroup", check_semigroup),
    ("boundary", check_boundary),
    ("telescoping", check_telescoping),
    ("adomian", check_adomian),
    ("transcription", check_transcription),
    ("convergence", check_convergence),
    ("comparison", check_comparison),
    ("alpha-sweep", check_alpha_sweep),
    ("determinism", check_determinism),
];

fn err<E: ToString>(e: E) -> String {
    e.to_string()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

#[allow(clippy::excessive_precision)]
const GAMMA_TABLE: [(f64, f64); 12] = [
    (0.1, 9.513_507_698_668_731),
    (0.3, 2.991_568_987_687_590_7),
    (0.5, 1.772_453_850_905_516),
    (0.7, 1.298_055_332_647_557_8),
    (1.5, 0.886_226_925_452_758),
    (2.5, 1.329_340_388_179_137),
    (3.7, 4.170_651_783_796_604),
    (5.0, 24.0),
    (10.5, 1_133_278.388_948_785_6),
    (20.0, 121_645_100_408_832_000.0),
    (-0.5, -3.544_907_701_811_032),
    (-1.5, 2.363_271_801_207_354_7),
];

fn check_gamma(opts: &VerifyOptions) -> CheckResult {
    let mut worst = (0.0, 0.0);
    for (x, want) in GAMMA_TABLE {
        let e = rel((opts.gamma)(x).map_err(err)?, want);
        if e > worst.1 {
            worst = (x, e);
        }
    }
    Ok((
        worst.1 <= 1e-13,
        format!("worst relative error {:.2e} at x = {}", worst.1, worst.0),
    ))
}

const LAMBDAS: [f64; 5] = [0.0, 0.5, 1.0, 2.0, 3.7];
const ORDERS: [f64; 4] = [0.3, 0.5, 0.9, 1.0];
const TIMES: [f64; 2] = [0.5, 1.0];

fn check_power_rule(opts: &VerifyOptions) -> CheckResult {
    let mut worst = (0.0, "".to_string());
    for lambda in LAMBDAS {
        for alpha in ORDERS {
            let series = Series::term(lambda, Poly::one())
                .frac_integral(alpha)
                .map_err(err)?;
            for t in TIMES {
                let rule = series.eval(&Point::x(0.0), t).map_err(err)?;
                let quad = rl_integral_quadrature(|s| s.powf(lambda), alpha, t).map_err(err)?;
                let e = rel(rule, quad);
                if e >= worst.0 {
                    worst = (e, format!("lambda={lambda} alpha={alpha} t={t}"));
                }
            }
        }
    }
    Ok((
        worst.0 <= opts.quad_tol,
        format!(
            "40 points, worst relative gap {:.2e} ({}), tolerance {:.0e}",
            worst.0, worst.1, opts.quad_tol
        ),
    ))
}

/// A random series of one to five terms with coefficients built from
/// `1, x, x^2, sin x, exp x`; positive exponents are at least 1 so every
/// Caputo derivative of order up to 1 exists.
fn random_series(rng: &mut ChaCha8Rng, max_terms: usize) -> Series {
    let x = Poly::var(Var::X);
    let basis = [
        Poly::one(),
        x.clone(),
        x.mul(&x),
        Poly::sin(&x),
        Poly::exp(&x),
    ];
    let n = rng.random_range(1..=max_terms);
    let terms = (0..n)
        .map(|_| {
            let mu = if rng.random_bool(0.25) {
                0.0
            } else {
                rng.random_range(1.0..4.0)
            };
            let coeff = basis.iter().fold(Poly::zero(), |acc, b| {
                if rng.random_bool(0.6) {
                    acc.add(&b.scale(rng.random_range(-2.0..2.0)))
                } else {
                    acc
                }
            });
            TimeTerm { mu, coeff }
        })
        .collect();
    Series::from_terms(terms)
}

fn check_semigroup(opts: &VerifyOptions) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let u = random_series(&mut rng, 5);
        let a = rng.random_range(0.1..=1.0);
        let b = rng.random_range(0.1..=1.0);
        let lhs = u
            .frac_integral(b)
            .and_then(|v| v.frac_integral(a))
            .map_err(err)?;
        let rhs = u.frac_integral(a + b).map_err(err)?;
        worst = worst.max(lhs.max_coeff_diff(&rhs));
        let back = u.frac_integral(a).and_then(|v| v.caputo(a)).map_err(err)?;
        worst = worst.max(back.max_coeff_diff(&u));
        let forth = u.caputo(a).and_then(|v| v.frac_integral(a)).map_err(err)?;
        worst = worst.max(forth.max_coeff_diff(&u.without_initial_value()));
    }
    Ok((
        worst <= 1e-12,
        format!("50 random series, worst coefficient error {worst:.2e}"),
    ))
}

fn manufactured_mldm(id: &str, alpha: f64, n: usize) -> Result<(ProblemSpec, SolveTrace), String> {
    let p = builtin(id, alpha, SourceMode::Manufactured).map_err(err)?;
    let trace = mldm_solve(&p, n, &SolveOptions::default()).map_err(err)?;
    Ok((p, trace))
}

/// Largest mismatch between `u` and the boundary data on the grid points of
/// each face.
fn boundary_gap(u: &Series, p: &ProblemSpec, grid: &Grid) -> Result<f64, String> {
    let data = p.boundary.as_ref().ok_or("no boundary data")?;
    let mut worst: f64 = 0.0;
    for (face, g) in data.faces() {
        let at = face.position(&p.domain).ok_or("face outside the domain")?;
        let along: Vec<f64> = match face.var() {
            Var::X => grid.ys.clone().unwrap_or_else(|| vec![0.0]),
            Var::Y => grid.xs.clone(),
        };
        for s in along {
            let pt = match (face.var(), p.dimension()) {
                (Var::X, 1) => Point::x(at),
                (Var::X, _) => Point::xy(at, s),
                (Var::Y, _) => Point::xy(s, at),
            };
            let got = u.eval_times(&pt, &grid.ts).map_err(err)?;
            let want = g.eval_times(&pt, &grid.ts).map_err(err)?;
            for (a, b) in got.iter().zip(want) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    Ok(worst)
}

fn check_boundary(_: &VerifyOptions) -> CheckResult {
    let mut worst: f64 = 0.0;
    let mut faces = 0;
    for id in builtin_ids() {
        let (p, trace) = manufactured_mldm(id, 1.0, 4)?;
        let grid = Grid::default_for(&p.domain);
        faces += p.boundary.as_ref().map_or(0, |b| b.faces().len());
        for r in &trace.records {
            worst = worst.max(boundary_gap(&r.partial_sum, &p, &grid)?);
        }
        worst = worst.max(boundary_gap(&trace.records[0].u_star, &p, &grid)?);
    }
    Ok((
        worst <= 1e-12,
        format!("7 problems, {faces} faces, n <= 4, worst gap {worst:.2e}"),
    ))
}

fn check_telescoping(_: &VerifyOptions) -> CheckResult {
    let mut worst: f64 = 0.0;
    let mut detail = String::new();
    for (id, alpha) in [("p6", 1.0), ("p6", 0.5), ("p7", 1.0), ("p7", 0.75)] {
        let (p, trace) = manufactured_mldm(id, alpha, 3)?;
        let caps = SeriesCaps::default();
        let mut sum = Series::zero();
        for r in &trace.records {
            sum = sum.add(&r.nonlinear);
            let direct = p.nonlinear.apply(&r.partial_sum, &caps).map_err(err)?;
            worst = worst.max(sum.max_coeff_diff(&direct));
        }
        let _ = write!(detail, "{id}@{alpha} ");
    }
    Ok((
        worst <= 1e-12,
        format!("{detail}n <= 3, worst coefficient error {worst:.2e}"),
    ))
}

/// Independent oracle: `A_k = (1/k!) d^k/dλ^k N(Σ λ^i u_i)` at `λ = 0`,
/// extracted pointwise by a discrete Fourier transform on the unit circle.
/// `values[i]` maps each derivative key to the value of `u_i`.
pub fn adomian_oracle(op: &NonlinearOp, values: &[BTreeMap<(u8, Var), f64>], k: usize) -> f64 {
    const M: usize = 32;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..M {
        let lambda = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / M as f64);
        let mut n = Complex64::new(0.0, 0.0);
        for prod in &op.products {
            let mut term = Complex64::new(prod.coeff, 0.0);
            for f in &prod.factors {
                let key = if f.order == 0 {
                    (0, Var::X)
                } else {
                    (f.order, f.var)
                };
                let mut v = Complex64::new(0.0, 0.0);
                let mut lp = Complex64::new(1.0, 0.0);
                for comp in values {
                    v += lp * comp[&key];
                    lp *= lambda;
                }
                term *= v.powu(f.power);
            }
            n += term;
        }
        acc += n * lambda.powu(k as u32).inv();
    }
    acc.re / M as f64
}

fn check_adomian(opts: &VerifyOptions) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xadd);
    let square = NonlinearOp::none().with(1.0, vec![Factor::u(2)]);
    let advect = NonlinearOp::none().with(1.0, vec![Factor::u(1), Factor::d(1, Var::X)]);
    let caps = SeriesCaps::default();
    let domain = Domain::line(0.0, 1.0);
    let mut worst: f64 = 0.0;
    for (op, lists) in [(&square, 20), (&advect, 10)] {
        let keys = {
            let mut k = op.derivatives();
            if !k.contains(&(0, Var::X)) {
                k.push((0, Var::X));
            }
            k
        };
        for _ in 0..lists {
            let comps: Vec<Series> = (0..4).map(|_| random_series(&mut rng, 3)).collect();
            let polys = adomian_polys(op, &comps, &caps).map_err(err)?;
            for pt in sample_points(&domain, 8) {
                for t in [0.3, 0.7, 1.0] {
                    let mut values = Vec::new();
                    for c in &comps {
                        let mut m = BTreeMap::new();
                        for &(order, var) in &keys {
                            let d = c.spatial_apply(order, var);
                            m.insert((order, var), d.eval(&pt, t).map_err(err)?);
                        }
                        values.push(m);
                    }
                    for (k, a) in polys.iter().enumerate() {
                        let got = a.eval(&pt, t).map_err(err)?;
                        let want = adomian_oracle(op, &values, k);
                        worst = worst.max((got - want).abs() / (1.0 + want.abs()));
                    }
                }
            }
        }
    }
    Ok((
        worst <= 1e-12,
        format!("A_0..A_3 for u^2 and u*u_x on 30 random lists, worst error {worst:.2e}"),
    ))
}

fn series_equal_sampled(a: &Series, b: &Series, domain: &Domain, tol: f64) -> Result<bool, String> {
    for term in a.sub(b).terms() {
        if !poly_equal_sampled(&term.coeff, &Poly::zero(), domain, 64, tol).map_err(err)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Residuals the printed data of the inconsistent built-ins must show.
fn expected_residuals(id: &str) -> Option<Vec<(CheckKind, &'static str)>> {
    match id {
        "p1" => Some(vec![(
            CheckKind::Source,
            "2/gamma(3-alpha)*x*(2-x)*(1 - t^(2-alpha)) - t^2*x*(2-x)",
        )]),
        "p3" => Some(vec![(CheckKind::Source, "t^3*(cos(x) - sin(x))")]),
        "p4" => Some(vec![
            (CheckKind::Source, "t^(3+alpha)*(2*sin(x) - cos(x))"),
            (CheckKind::Initial, "x^2 - 1"),
        ]),
        _ => None,
    }
}

fn check_transcription(_: &VerifyOptions) -> CheckResult {
    let mut ok = true;
    let mut notes = Vec::new();
    for id in ["p5", "p6"] {
        for alpha in [0.3, 0.5, 0.8, 1.0] {
            let printed = builtin(id, alpha, SourceMode::PaperLiteral).map_err(err)?;
            let made = builtin(id, alpha, SourceMode::Manufactured).map_err(err)?;
            if !series_equal_sampled(&printed.source, &made.source, &made.domain, 1e-10)? {
                ok = false;
                notes.push(format!("{id} source differs at alpha={alpha}"));
            }
        }
    }
    for id in ["p1", "p3", "p4"] {
        for alpha in [0.5, 1.0] {
            let p = builtin(id, alpha, SourceMode::PaperLiteral).map_err(err)?;
            let report = validate_consistency(&p).map_err(err)?;
            let expected = expected_residuals(id).expect("listed");
            let flagged: Vec<CheckKind> = report.failures().map(|c| c.kind).collect();
            let wanted: Vec<CheckKind> = expected.iter().map(|(k, _)| *k).collect();
            if flagged != wanted {
                ok = false;
                notes.push(format!("{id}@{alpha}: {}", report.status()));
                continue;
            }
            for (kind, text) in expected {
                let want = Series::parse(text, Some(alpha)).map_err(err)?;
                let got = &report.check(kind).expect("flagged").residual;
                if !series_equal_sampled(got, &want, &p.domain, 1e-9)? {
                    ok = false;
                    notes.push(format!("{id}@{alpha} {kind} residual is {got}"));
                }
            }
        }
    }
    let detail = if ok {
        "p5/p6 printed sources match; p1, p3, p4 flagged with the expected residuals".to_string()
    } else {
        notes.join("; ")
    };
    Ok((ok, detail))
}

/// Strict decrease, or both errors already at round-off.
fn improved(e2: f64, e4: f64) -> bool {
    e4 < e2 || (e2 <= 1e-12 && e4 <= 1e-12)
}

fn check_convergence(_: &VerifyOptions) -> CheckResult {
    let mut ok = true;
    let mut notes = Vec::new();
    for id in builtin_ids() {
        let (p, trace) = manufactured_mldm(id, 1.0, 4)?;
        let grid = Grid::default_for(&p.domain);
        let exact = p.exact.as_ref().ok_or("no exact solution")?;
        let err_at = |n: usize| -> Result<f64, String> {
            Ok(grid_error(&trace.records[n].partial_sum, exact, &grid)
                .map_err(err)?
                .max_abs)
        };
        let (e2, e4) = (err_at(2)?, err_at(4)?);
        let res = trace
            .records
            .iter()
            .map(|r| residual(&r.partial_sum, &p, &grid).map_err(err))
            .collect::<Result<Vec<_>, _>>()?;
        let monotone = res.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        let pass = improved(e2, e4) && monotone;
        ok &= pass;
        let tie = if e4 >= e2 && pass {
            " (exact to round-off)"
        } else {
            ""
        };
        notes.push(format!(
            "{id} {} e2={e2:.1e} e4={e4:.1e}{tie}{}",
            if pass { "ok" } else { "FAIL" },
            if monotone { "" } else { " residual increases" }
        ));
    }
    Ok((ok, notes.join("; ")))
}

fn check_comparison(_: &VerifyOptions) -> CheckResult {
    let mut ok = true;
    let mut worst = f64::INFINITY;
    let mut notes = Vec::new();
    for id in ["p5", "p6"] {
        for alpha in [0.8, 1.0] {
            let p = builtin(id, alpha, SourceMode::Manufactured).map_err(err)?;
            let grid = Grid::default_for(&p.domain);
            let exact = p.exact.as_ref().ok_or("no exact solution")?;
            let opts = SolveOptions::default();
            let l = ladm_solve(&p, 3, &opts).map_err(err)?;
            let m = mldm_solve(&p, 3, &opts).map_err(err)?;
            for n in 1..=3 {
                let el = grid_error(&l.records[n].partial_sum, exact, &grid)
                    .map_err(err)?
                    .max_abs;
                let em = grid_error(&m.records[n].partial_sum, exact, &grid)
                    .map_err(err)?
                    .max_abs;
                worst = worst.min(el - em);
                if em > el {
                    ok = false;
                    notes.push(format!("{id}@{alpha} n={n}: mldm {em:.2e} > ladm {el:.2e}"));
                }
            }
        }
    }
    let detail = if ok {
        format!("p5, p6 at alpha 0.8, 1 and n = 1..3; smallest margin {worst:.2e}")
    } else {
        notes.join("; ")
    };
    Ok((ok, detail))
}

pub const SWEEP_ALPHAS: [f64; 3] = [0.6, 0.8, 1.0];
pub const SWEEP_ITERATIONS: usize = 3;

/// Max-abs distance of the MLDM solution for each order in
/// [`SWEEP_ALPHAS`] to the order-one exact solution, the source being held
/// at its order-one form.
pub fn sweep_distances(id: &str) -> Result<Vec<f64>, String> {
    SWEEP_ALPHAS
        .par_iter()
        .map(|&alpha| {
            let p = builtin(id, alpha, SourceMode::Frozen).map_err(err)?;
            let grid = Grid::default_for(&p.domain);
            let trace = mldm_solve(&p, SWEEP_ITERATIONS, &SolveOptions::default()).map_err(err)?;
            let exact = p.exact.as_ref().ok_or("no exact solution")?;
            Ok(grid_error(trace.last(), exact, &grid).map_err(err)?.max_abs)
        })
        .collect()
}

fn check_alpha_sweep(_: &VerifyOptions) -> CheckResult {
    let ids: Vec<&str> = builtin_ids().collect();
    let all = ids
        .par_iter()
        .map(|id| sweep_distances(id))
        .collect::<Result<Vec<_>, _>>()?;
    let mut ok = true;
    let mut notes = Vec::new();
    for (id, d) in ids.iter().zip(&all) {
        let monotone = d.windows(2).all(|w| w[1] <= w[0]);
        ok &= monotone;
        notes.push(format!(
            "{id} {} {:.1e}/{:.1e}/{:.1e}",
            if monotone { "ok" } else { "FAIL" },
            d[0],
            d[1],
            d[2]
        ));
    }
    Ok((ok, notes.join("; ")))
}

fn check_determinism(_: &VerifyOptions) -> CheckResult {
    let base = std::env::temp_dir().join(format!("fracdecomp-verify-{}", std::process::id()));
    let run = |k: usize| -> Result<Vec<(PathBuf, Vec<u8>)>, String> {
        let cfg = RunConfig {
            alphas: vec![0.8, 1.0],
            method: MethodChoice::Both,
            out: base.join(k.to_string()),
            jobs: 2,
            timing: false,
            quiet: true,
            ..RunConfig::builtin("p6")
        };
        let out = cmd_solve(&cfg).map_err(err)?;
        out.files
            .iter()
            .map(|f| {
                Ok((
                    f.file_name().map(PathBuf::from).unwrap_or_default(),
                    fs::read(f).map_err(err)?,
                ))
            })
            .collect()
    };
    let first = run(0);
    let second = run(1);
    let _ = fs::remove_dir_all(&base);
    let (first, second) = (first?, second?);
    let same = first == second;
    Ok((
        same,
        format!(
            "{} files, {} bytes, {}",
            first.len(),
            first.iter().map(|f| f.1.len()).sum::<usize>(),
            if same { "identical" } else { "differ" }
        ),
    ))
}

/// Runs the selected checks in parallel; results keep the table order.
pub fn run_checks(opts: &VerifyOptions) -> Vec<CheckOutcome> {
    CHECKS
        .par_iter()
        .filter(|(name, _)| opts.only.as_deref().is_none_or(|o| name.contains(o)))
        .map(|(name, check)| {
            let start = Instant::now();
            let (passed, detail) = match check(opts) {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            CheckOutcome {
                name,
                passed,
                detail,
                seconds: start.elapsed().as_secs_f64(),
            }
        })
        .collect()
}

pub fn format_outcomes(outcomes: &[CheckOutcome]) -> String {
    let mut s = String::new();
    for o in outcomes {
        let _ = writeln!(
            s,
            "{} {:<13} {:>7.2}s  {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.seconds,
            o.detail
        );
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    let _ = writeln!(s, "{} checks, {} failed", outcomes.len(), failed);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn only(name: &str) -> VerifyOptions {
        VerifyOptions {
            only: Some(name.into()),
            ..VerifyOptions::default()
        }
    }

    #[test]
    fn corrupted_gamma_is_named() {
        fn bad(x: f64) -> Result<f64, FracError> {
            Ok(gamma(x)? * (1.0 + 1e-9))
        }
        let opts = VerifyOptions {
            gamma: bad,
            ..only("gamma")
        };
        let out = run_checks(&opts);
        assert_eq!(out.len(), 1);
        assert!(!out[0].passed);
        assert_eq!(out[0].name, "gamma");
        assert!(run_checks(&only("gamma"))[0].passed);
    }

    #[test]
    fn oracle_matches_closed_form_square() {
        let v = |a: f64| BTreeMap::from([((0, Var::X), a)]);
        let values = [v(1.5), v(-0.5), v(2.0)];
        let square = NonlinearOp::none().with(1.0, vec![Factor::u(2)]);
        // A_2 = u_1^2 + 2 u_0 u_2
        let want = 0.25 + 2.0 * 1.5 * 2.0;
        assert!((adomian_oracle(&square, &values, 2) - want).abs() < 1e-13);
    }

    #[test]
    fn power_rule_fails_below_round_off() {
        let out = run_checks(&VerifyOptions {
            quad_tol: 1e-16,
            ..only("power-rule")
        });
        assert!(!out[0].passed, "{}", out[0].detail);
        assert!(run_checks(&only("power-rule"))[0].passed);
    }

    #[test]
    fn unknown_filter_runs_nothing() {
        assert!(run_checks(&only("nothing-matches")).is_empty());
    }
}
