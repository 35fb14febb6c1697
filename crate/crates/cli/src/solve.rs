use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use fracdecomp::decomp::{solve, Correction, Method, SolveOptions, SolveTrace};
use fracdecomp::eval::{
    convergence_report, grid_error, points_header, write_plot_data, write_points, write_summary,
    ConvergenceRow, ErrorReport, Grid, PlotCurve, PointError,
};
use fracdecomp::fracterm::Series;
use fracdecomp::problems::{
    builtin, parse_problem_file, validate_consistency, ProblemError, ProblemSpec, SourceMode,
};
use rayon::prelude::*;

use crate::config::{ProblemSource, RunConfig};
use crate::CliError;

/// Everything computed for one fractional order.
#[derive(Clone, Debug)]
pub struct AlphaRun {
    pub problem: ProblemSpec,
    pub grid: Grid,
    pub traces: Vec<SolveTrace>,
    pub rows: Vec<ConvergenceRow>,
    /// Pointwise comparison of the final iterate of each trace.
    pub finals: Vec<ErrorReport>,
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub id: String,
    pub runs: Vec<AlphaRun>,
    pub files: Vec<PathBuf>,
}

impl SolveOutcome {
    pub fn rows(&self) -> impl Iterator<Item = &ConvergenceRow> {
        self.runs.iter().flat_map(|r| r.rows.iter())
    }
}

fn problem_error(e: ProblemError) -> CliError {
    match e {
        ProblemError::Decomp(_) | ProblemError::Sym(_) => CliError::Failure(e.to_string()),
        _ => CliError::Input(e.to_string()),
    }
}

/// Builds the problem for one order; `None` keeps the order stated in a
/// problem file.
pub fn load_problem(cfg: &RunConfig, alpha: Option<f64>) -> Result<ProblemSpec, CliError> {
    match &cfg.problem {
        ProblemSource::Builtin(id) => {
            builtin(id, alpha.unwrap_or(1.0), cfg.mode).map_err(problem_error)
        }
        ProblemSource::File(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            parse_problem_file(&text, alpha).map_err(|e| match e {
                ProblemError::Expr { .. } | ProblemError::Toml(_) => {
                    CliError::Input(format!("{}: {e}", path.display()))
                }
                other => problem_error(other),
            })
        }
    }
}

fn gate(p: &ProblemSpec, cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.allow_inconsistent || p.source_mode != SourceMode::PaperLiteral || p.exact.is_none() {
        return Ok(());
    }
    let report = validate_consistency(p).map_err(problem_error)?;
    if report.is_consistent() {
        return Ok(());
    }
    Err(CliError::Consistency(format!(
        "{report}\nthe printed data contradicts the exact solution; \
         pass --allow-inconsistent to solve it anyway"
    )))
}

fn approximation_only(u: &Series, grid: &Grid) -> Result<ErrorReport, CliError> {
    let mut points = Vec::with_capacity(grid.len());
    for p in grid.space_points() {
        let values = u
            .eval_times(&p, &grid.ts)
            .map_err(|e| CliError::Failure(e.to_string()))?;
        for (&t, approx) in grid.ts.iter().zip(values) {
            points.push(PointError {
                point: p,
                t,
                approx,
                exact: f64::NAN,
                abs_error: f64::NAN,
            });
        }
    }
    Ok(ErrorReport {
        points,
        max_abs: f64::NAN,
        l2: f64::NAN,
    })
}

fn run_alpha(cfg: &RunConfig, alpha: Option<f64>) -> Result<AlphaRun, CliError> {
    let problem = load_problem(cfg, alpha)?;
    gate(&problem, cfg)?;
    let grid = Grid::new(&problem.domain, &cfg.grid).map_err(|e| CliError::Input(e.to_string()))?;
    let opts = SolveOptions {
        correction: Correction {
            weights: cfg.weights,
            ..Correction::default()
        },
        ..SolveOptions::default()
    };
    let traces = cfg
        .method
        .methods()
        .into_iter()
        .map(|m| solve(m, &problem, cfg.iterations, &opts))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Failure(e.to_string()))?;
    let rows = convergence_report(&traces, &problem, &grid)
        .map_err(|e| CliError::Failure(e.to_string()))?;
    let finals = traces
        .iter()
        .map(|t| match &problem.exact {
            Some(exact) => {
                grid_error(t.last(), exact, &grid).map_err(|e| CliError::Failure(e.to_string()))
            }
            None => approximation_only(t.last(), &grid),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AlphaRun {
        problem,
        grid,
        traces,
        rows,
        finals,
    })
}

fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Profile of the final iterate at `t_max`; 2D problems are cut at the
/// middle `y` of the grid.
fn solution_curve(method: Method, run: &AlphaRun, report: &ErrorReport) -> PlotCurve {
    let g = &run.grid;
    let t_end = *g.ts.last().expect("grid has times");
    let y_cut = g.ys.as_ref().map(|ys| ys[ys.len() / 2]);
    let rows = report
        .points
        .iter()
        .filter(|p| p.t == t_end && (y_cut.is_none() || p.point.y == y_cut))
        .map(|p| vec![p.point.x.unwrap_or(0.0), p.approx, p.exact])
        .collect();
    let mut label = format!(
        "{} {} alpha={} n={} t={}",
        run.problem.id,
        method,
        run.problem.alpha,
        iterations_of(run),
        t_end
    );
    if let Some(y) = y_cut {
        let _ = write!(label, " y={y}");
    }
    PlotCurve {
        label,
        columns: vec!["x".into(), "approx".into(), "exact".into()],
        rows,
    }
}

fn iterations_of(run: &AlphaRun) -> usize {
    run.traces.first().map_or(0, SolveTrace::iterations)
}

fn convergence_curve(method: Method, run: &AlphaRun) -> PlotCurve {
    PlotCurve {
        label: format!(
            "{} {} alpha={} convergence",
            run.problem.id, method, run.problem.alpha
        ),
        columns: vec!["n".into(), "max_abs".into(), "l2".into(), "residual".into()],
        rows: run
            .rows
            .iter()
            .filter(|r| r.method == method)
            .map(|r| vec![r.iterations as f64, r.max_abs, r.l2, r.residual])
            .collect(),
    }
}

fn write_outputs(cfg: &RunConfig, id: &str, runs: &[AlphaRun]) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(&cfg.out).map_err(|e| {
        CliError::Input(format!(
            "cannot create output directory {}: {e}",
            cfg.out.display()
        ))
    })?;
    let stem = file_stem(id);
    let path = |suffix: &str| cfg.out.join(format!("{stem}_{suffix}"));
    let files = vec![
        path("points.csv"),
        path("summary.csv"),
        path("solution.dat"),
        path("convergence.dat"),
    ];

    let mut w = BufWriter::new(File::create(&files[0])?);
    let dimension = runs.first().map_or(1, |r| r.problem.dimension());
    writeln!(w, "{}", points_header(dimension))?;
    for run in runs {
        for (trace, report) in run.traces.iter().zip(&run.finals) {
            write_points(
                &mut w,
                trace.method,
                trace.alpha,
                trace.iterations(),
                report,
            )?;
        }
    }
    w.flush()?;

    let rows: Vec<ConvergenceRow> = runs.iter().flat_map(|r| r.rows.iter().copied()).collect();
    let mut w = BufWriter::new(File::create(&files[1])?);
    write_summary(&mut w, &rows, cfg.timing)?;
    w.flush()?;

    let mut solution = Vec::new();
    let mut convergence = Vec::new();
    for run in runs {
        for (trace, report) in run.traces.iter().zip(&run.finals) {
            solution.push(solution_curve(trace.method, run, report));
            convergence.push(convergence_curve(trace.method, run));
        }
    }
    for (file, curves) in files[2..].iter().zip([solution, convergence]) {
        let mut w = BufWriter::new(File::create(file)?);
        write_plot_data(&mut w, &curves)?;
        w.flush()?;
    }
    Ok(files)
}

/// Solves every requested order (in parallel over `cfg.jobs` workers) and
/// writes the per-point CSV, the summary CSV and two plot-data files.
pub fn cmd_solve(cfg: &RunConfig) -> Result<SolveOutcome, CliError> {
    cfg.validate()?;
    let alphas: Vec<Option<f64>> = if cfg.alphas.is_empty() {
        vec![None]
    } else {
        cfg.alphas.iter().copied().map(Some).collect()
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| CliError::Failure(e.to_string()))?;
    let results: Vec<Result<AlphaRun, CliError>> =
        pool.install(|| alphas.par_iter().map(|&a| run_alpha(cfg, a)).collect());
    let runs = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let id = runs
        .first()
        .map(|r| r.problem.id.clone())
        .unwrap_or_default();
    let files = write_outputs(cfg, &id, &runs)?;
    Ok(SolveOutcome { id, runs, files })
}

fn sci(v: f64) -> String {
    if v.is_nan() {
        "-".to_string()
    } else {
        format!("{v:.3e}")
    }
}

/// Human-readable summary table.
pub fn summary_table(outcome: &SolveOutcome, timing: bool) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        "{:<6} {:>6} {:>4} {:>11} {:>11} {:>11}",
        "method", "alpha", "n", "max_abs", "l2", "residual"
    );
    if timing {
        let _ = write!(s, " {:>9}", "seconds");
    }
    s.push('\n');
    for r in outcome.rows() {
        let _ = write!(
            s,
            "{:<6} {:>6} {:>4} {:>11} {:>11} {:>11}",
            r.method.name(),
            r.alpha,
            r.iterations,
            sci(r.max_abs),
            sci(r.l2),
            sci(r.residual)
        );
        if timing {
            let _ = write!(s, " {:>9.3}", r.seconds);
        }
        s.push('\n');
    }
    for run in &outcome.runs {
        for t in run.traces.iter().filter(|t| t.truncated()) {
            let _ = writeln!(
                s,
                "note: {} alpha={} hit the series growth caps; high-order terms were dropped",
                t.method, t.alpha
            );
        }
    }
    s
}
