//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary so the lines appear in `cargo test` output. A
//! criterion listed in `KNOWN_RED` still prints FAIL but does not fail the
//! target; any other failure, or a known-red criterion that starts passing,
//! exits nonzero.

use std::collections::BTreeMap;
use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use fracdecomp::decomp::{
    adomian_polys, ladm_solve, mldm_solve, Factor, NonlinearOp, SolveOptions,
};
use fracdecomp::eval::{grid_error, residual, rl_integral_quadrature, Grid};
use fracdecomp::fracterm::{Series, SeriesCaps, TimeTerm};
use fracdecomp::problems::{builtin, builtin_ids, validate_consistency, CheckKind, SourceMode};
use fracdecomp::symx::{poly_equal_sampled, sample_points, Domain, Point, Poly, Var};
use fracdecomp_cli::cmd_solve;
use fracdecomp_cli::config::{MethodChoice, RunConfig};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria that cannot hold for the reason given.
const KNOWN_RED: [(u8, &str); 1] = [(
    7,
    "p7 series diverges on t in [0, 1]; its radius of convergence in t is below 0.3",
)];

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

fn within(start: Instant, limit: f64) -> (bool, String) {
    let s = start.elapsed().as_secs_f64();
    (s < limit, format!("{s:.2}s < {limit}s"))
}

fn power_rule() -> Verdict {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for lambda in [0.0, 0.5, 1.0, 2.0, 3.7] {
        for alpha in [0.3, 0.5, 0.9, 1.0] {
            let rule = Series::term(lambda, Poly::one())
                .frac_integral(alpha)
                .unwrap();
            for t in [0.5, 1.0] {
                let symbolic = rule.eval(&Point::x(0.0), t).unwrap();
                let quad = rl_integral_quadrature(|s| s.powf(lambda), alpha, t).unwrap();
                worst = worst.max((symbolic - quad).abs() / quad.abs());
                count += 1;
            }
        }
    }
    let (fast, time) = within(start, 5.0);
    verdict(
        count == 40 && worst <= 1e-8 && fast,
        format!("{count} lattice points, worst relative gap {worst:.2e} <= 1e-8, {time}"),
    )
}

fn random_series(rng: &mut ChaCha8Rng, max_terms: usize, fractional: bool) -> Series {
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
            let mu = match rng.random_range(0..4) {
                0 => 0.0,
                1 if fractional => rng.random_range(0.0..1.0),
                _ => rng.random_range(1.0..4.0),
            };
            let mut coeff = Poly::zero();
            for b in &basis {
                if rng.random_bool(0.6) {
                    coeff = coeff.add(&b.scale(rng.random_range(-2.0..2.0)));
                }
            }
            TimeTerm { mu, coeff }
        })
        .collect();
    Series::from_terms(terms)
}

fn semigroup() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let u = random_series(&mut rng, 5, false);
        let a = rng.random_range(0.05..=1.0);
        let b = rng.random_range(0.05..=1.0);
        let twice = u.frac_integral(b).unwrap().frac_integral(a).unwrap();
        worst = worst.max(twice.max_coeff_diff(&u.frac_integral(a + b).unwrap()));
        let left_inverse = u.frac_integral(a).unwrap().caputo(a).unwrap();
        worst = worst.max(left_inverse.max_coeff_diff(&u));
        let right_inverse = u.caputo(a).unwrap().frac_integral(a).unwrap();
        worst = worst.max(right_inverse.max_coeff_diff(&u.without_initial_value()));
    }
    let (fast, time) = within(start, 2.0);
    verdict(
        worst <= 1e-12 && fast,
        format!("50 random series, worst coefficient error {worst:.2e} <= 1e-12, {time}"),
    )
}

/// Largest `|u - g|` over the default-grid points of every face.
fn face_gap(u: &Series, data: &[(f64, Var, Series)], grid: &Grid) -> f64 {
    let mut worst: f64 = 0.0;
    for (at, var, g) in data {
        let points: Vec<Point> = match (var, &grid.ys) {
            (Var::X, None) => vec![Point::x(*at)],
            (Var::X, Some(ys)) => ys.iter().map(|&y| Point::xy(*at, y)).collect(),
            (Var::Y, _) => grid.xs.iter().map(|&x| Point::xy(x, *at)).collect(),
        };
        for p in points {
            for &t in &grid.ts {
                worst = worst.max((u.eval(&p, t).unwrap() - g.eval(&p, t).unwrap()).abs());
            }
        }
    }
    worst
}

fn boundary() -> Verdict {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for id in builtin_ids() {
        let p = builtin(id, 1.0, SourceMode::Manufactured).unwrap();
        let exact = p.exact.clone().unwrap();
        let grid = Grid::default_for(&p.domain);
        // faces written out from the exact solution, independently of the
        // solver's own boundary data
        let mut faces = vec![
            (p.domain.x.lo, Var::X, exact.subst(Var::X, p.domain.x.lo)),
            (p.domain.x.hi, Var::X, exact.subst(Var::X, p.domain.x.hi)),
        ];
        if let Some(y) = p.domain.y {
            faces.push((y.lo, Var::Y, exact.subst(Var::Y, y.lo)));
            faces.push((y.hi, Var::Y, exact.subst(Var::Y, y.hi)));
        }
        let trace = mldm_solve(&p, 4, &SolveOptions::default()).unwrap();
        let mut partial = Series::zero();
        for r in &trace.records {
            partial = partial.add(&r.u_star);
            worst = worst.max(face_gap(&partial, &faces, &grid));
            checked += 1;
        }
    }
    let (fast, time) = within(start, 30.0);
    verdict(
        worst <= 1e-12 && fast,
        format!("{checked} corrected iterates over 7 problems, worst face gap {worst:.2e} <= 1e-12, {time}"),
    )
}

fn telescoping() -> Verdict {
    let mut worst: f64 = 0.0;
    let caps = SeriesCaps::default();
    let mut runs = Vec::new();
    for id in ["p6", "p7"] {
        for alpha in [1.0, 0.75] {
            let p = builtin(id, alpha, SourceMode::Manufactured).unwrap();
            let trace = mldm_solve(&p, 3, &SolveOptions::default()).unwrap();
            let mut sum_b = Series::zero();
            let mut sum_u = Series::zero();
            for r in &trace.records {
                sum_b = sum_b.add(&r.nonlinear);
                sum_u = sum_u.add(&r.u_star);
                let direct = p.nonlinear.apply(&sum_u, &caps).unwrap();
                worst = worst.max(sum_b.max_coeff_diff(&direct));
            }
            runs.push(format!("{id}@{alpha}"));
        }
    }
    verdict(
        worst <= 1e-12,
        format!(
            "{} n <= 3, worst coefficient error {worst:.2e}",
            runs.join(" ")
        ),
    )
}

/// `A_k` read off the discrete Fourier transform of `λ -> (Σ λ^i u_i)^2`.
fn square_oracle(values: &[f64], k: usize) -> f64 {
    const M: usize = 16;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..M {
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (j as f64) / (M as f64));
        let s: Complex64 = values
            .iter()
            .enumerate()
            .map(|(i, v)| w.powu(i as u32) * v)
            .sum();
        acc += s * s * w.powu(k as u32).conj();
    }
    acc.re / M as f64
}

fn adomian() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let square = NonlinearOp::none().with(1.0, vec![Factor::u(2)]);
    let domain = Domain::line(0.0, 1.0);
    let mut worst: f64 = 0.0;
    for _ in 0..25 {
        let comps: Vec<Series> = (0..4).map(|_| random_series(&mut rng, 3, true)).collect();
        let polys = adomian_polys(&square, &comps, &SeriesCaps::default()).unwrap();
        assert_eq!(polys.len(), 4);
        for pt in sample_points(&domain, 10) {
            for t in [0.2, 0.6, 1.0] {
                let values: Vec<f64> = comps.iter().map(|c| c.eval(&pt, t).unwrap()).collect();
                for (k, a) in polys.iter().enumerate() {
                    let want = square_oracle(&values, k);
                    let got = a.eval(&pt, t).unwrap();
                    worst = worst.max((got - want).abs() / (1.0 + want.abs()));
                }
            }
        }
    }
    verdict(
        worst <= 1e-12,
        format!("A_0..A_3 of u^2 on 25 random lists, worst error vs lambda-expansion {worst:.2e}"),
    )
}

fn same_sampled(a: &Series, b: &Series, domain: &Domain, tol: f64) -> bool {
    a.sub(b)
        .terms()
        .iter()
        .all(|t| poly_equal_sampled(&t.coeff, &Poly::zero(), domain, 64, tol).unwrap())
}

fn transcription() -> Verdict {
    let mut problems = Vec::new();
    for id in ["p5", "p6"] {
        for alpha in [0.25, 0.5, 0.9, 1.0] {
            let printed = builtin(id, alpha, SourceMode::PaperLiteral).unwrap();
            let made = builtin(id, alpha, SourceMode::Manufactured).unwrap();
            if !same_sampled(&printed.source, &made.source, &made.domain, 1e-10) {
                problems.push(format!("{id}@{alpha} printed source differs"));
            }
        }
    }
    let expected: [(&str, &[(CheckKind, &str)]); 3] = [
        (
            "p1",
            &[(
                CheckKind::Source,
                "2/gamma(3-alpha)*x*(2-x) - 2/gamma(3-alpha)*t^(2-alpha)*x*(2-x) - t^2*x*(2-x)",
            )],
        ),
        ("p3", &[(CheckKind::Source, "t^3*cos(x) - t^3*sin(x)")]),
        (
            "p4",
            &[
                (
                    CheckKind::Source,
                    "2*t^(3+alpha)*sin(x) - t^(3+alpha)*cos(x)",
                ),
                (CheckKind::Initial, "x^2 - 1"),
            ],
        ),
    ];
    for (id, flags) in expected {
        for alpha in [0.4, 1.0] {
            let p = builtin(id, alpha, SourceMode::PaperLiteral).unwrap();
            let report = validate_consistency(&p).unwrap();
            let flagged: Vec<CheckKind> = report.failures().map(|c| c.kind).collect();
            let wanted: Vec<CheckKind> = flags.iter().map(|f| f.0).collect();
            if flagged != wanted {
                problems.push(format!("{id}@{alpha} flagged {}", report.status()));
                continue;
            }
            for (kind, text) in flags {
                let want = Series::parse(text, Some(alpha)).unwrap();
                let got = &report.check(*kind).unwrap().residual;
                if !same_sampled(got, &want, &p.domain, 1e-9) {
                    problems.push(format!("{id}@{alpha} {kind} residual {got}"));
                }
            }
        }
    }
    if problems.is_empty() {
        verdict(
            true,
            "p5, p6 printed h = manufactured h; p1 (source), p3 (source), p4 (source, initial) flagged with the expected residuals",
        )
    } else {
        verdict(false, problems.join("; "))
    }
}

fn convergence() -> Verdict {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for id in builtin_ids() {
        let p = builtin(id, 1.0, SourceMode::Manufactured).unwrap();
        let grid = Grid::default_for(&p.domain);
        let trace = mldm_solve(&p, 4, &SolveOptions::default()).unwrap();
        let exact = p.exact.as_ref().unwrap();
        let e = |n: usize| {
            grid_error(&trace.records[n].partial_sum, exact, &grid)
                .unwrap()
                .max_abs
        };
        let (e2, e4) = (e(2), e(4));
        let res: Vec<f64> = trace
            .records
            .iter()
            .map(|r| residual(&r.partial_sum, &p, &grid).unwrap())
            .collect();
        let decreasing = e4 < e2;
        let round_off = e2 <= 1e-12 && e4 <= 1e-12;
        let monotone = res.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        let pass = (decreasing || round_off) && monotone;
        ok &= pass;
        let mut note = format!("{id} e2={e2:.1e} e4={e4:.1e}");
        if round_off && !decreasing {
            note.push_str(" (tie: exact to round-off)");
        }
        if !monotone {
            note.push_str(&format!(
                " residual not monotone {:.1e}->{:.1e}",
                res[0], res[4]
            ));
        }
        parts.push(note);
    }
    let (fast, time) = within(start, 60.0);
    verdict(ok && fast, format!("{}; {time}", parts.join("; ")))
}

fn comparison() -> Verdict {
    let mut bad = Vec::new();
    let mut margin = f64::INFINITY;
    for id in ["p5", "p6"] {
        for alpha in [0.8, 1.0] {
            let p = builtin(id, alpha, SourceMode::Manufactured).unwrap();
            let grid = Grid::default_for(&p.domain);
            let exact = p.exact.as_ref().unwrap();
            let l = ladm_solve(&p, 3, &SolveOptions::default()).unwrap();
            let m = mldm_solve(&p, 3, &SolveOptions::default()).unwrap();
            for n in 1..=3 {
                let el = grid_error(&l.records[n].partial_sum, exact, &grid)
                    .unwrap()
                    .max_abs;
                let em = grid_error(&m.records[n].partial_sum, exact, &grid)
                    .unwrap()
                    .max_abs;
                margin = margin.min(el - em);
                if em > el {
                    bad.push(format!("{id}@{alpha} n={n}: {em:.2e} > {el:.2e}"));
                }
            }
        }
    }
    if bad.is_empty() {
        verdict(
            true,
            format!("12 cases, MLDM <= LADM, smallest margin {margin:.2e}"),
        )
    } else {
        verdict(false, bad.join("; "))
    }
}

fn alpha_sweep() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for id in builtin_ids() {
        let d: Vec<f64> = [0.6, 0.8, 1.0]
            .iter()
            .map(|&alpha| {
                let p = builtin(id, alpha, SourceMode::Frozen).unwrap();
                let grid = Grid::default_for(&p.domain);
                let trace = mldm_solve(&p, 3, &SolveOptions::default()).unwrap();
                grid_error(trace.last(), p.exact.as_ref().unwrap(), &grid)
                    .unwrap()
                    .max_abs
            })
            .collect();
        let monotone = d[0] >= d[1] && d[1] >= d[2];
        ok &= monotone;
        parts.push(format!("{id} {:.1e}>={:.1e}>={:.1e}", d[0], d[1], d[2]));
    }
    verdict(
        ok,
        format!("distance to the alpha=1 solution: {}", parts.join("; ")),
    )
}

fn determinism() -> Verdict {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut outputs = Vec::new();
    for d in &dirs {
        let cfg = RunConfig {
            alphas: vec![0.6, 1.0],
            method: MethodChoice::Both,
            iterations: 3,
            out: d.path().to_path_buf(),
            jobs: 2,
            timing: false,
            quiet: true,
            ..RunConfig::builtin("p5")
        };
        let out = cmd_solve(&cfg).unwrap();
        let files: BTreeMap<String, Vec<u8>> = out
            .files
            .iter()
            .map(|f| {
                (
                    f.file_name().unwrap().to_string_lossy().into_owned(),
                    fs::read(f).unwrap(),
                )
            })
            .collect();
        outputs.push(files);
    }
    let bytes: usize = outputs[0].values().map(Vec::len).sum();
    verdict(
        outputs[0] == outputs[1] && !outputs[0].is_empty(),
        format!(
            "{} files, {bytes} bytes, byte-identical across two runs",
            outputs[0].len()
        ),
    )
}

type Criterion = (u8, &'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            1,
            "fractional-integral power rule vs quadrature",
            power_rule,
        ),
        (2, "semigroup and inverse identities", semigroup),
        (3, "boundary exactness of corrected iterates", boundary),
        (4, "Jafari telescoping", telescoping),
        (5, "Adomian polynomials vs lambda-expansion", adomian),
        (
            6,
            "transcription anchors and consistency flags",
            transcription,
        ),
        (7, "MLDM convergence at alpha = 1", convergence),
        (8, "MLDM vs LADM comparison", comparison),
        (9, "alpha-sweep ordering", alpha_sweep),
        (10, "determinism of solve output", determinism),
    ];
    let mut unexpected = 0;
    for (n, name, run) in criteria {
        let v = run();
        let known = KNOWN_RED.iter().find(|(k, _)| *k == n);
        let tag = if v.passed { "PASS" } else { "FAIL" };
        let mut line = format!("acceptance {n:>2} {tag} {name}: {}", v.detail);
        match (v.passed, known) {
            (false, Some((_, why))) => line.push_str(&format!(" [known: {why}]")),
            (false, None) => unexpected += 1,
            (true, Some(_)) => {
                line.push_str(" [listed as known red; update KNOWN_RED]");
                unexpected += 1;
            }
            (true, None) => {}
        }
        println!("{line}");
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {unexpected} unexpected result(s)");
        ExitCode::FAILURE
    }
}
