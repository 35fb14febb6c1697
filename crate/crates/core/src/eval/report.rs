use std::io::{self, Write};

use super::{grid_error, residual, ErrorReport, EvalError, Grid};
use crate::decomp::{Method, SolveTrace};
use crate::problems::ProblemSpec;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub method: Method,
    pub alpha: f64,
    pub iterations: usize,
    pub max_abs: f64,
    pub l2: f64,
    pub residual: f64,
    /// Wall time spent up to and including this iteration.
    pub seconds: f64,
}

/// One row per iteration of every trace. Error columns are NaN when the
/// problem has no exact solution.
pub fn convergence_report(
    traces: &[SolveTrace],
    p: &ProblemSpec,
    grid: &Grid,
) -> Result<Vec<ConvergenceRow>, EvalError> {
    let mut rows = Vec::new();
    for trace in traces {
        if trace.problem != p.id || trace.alpha != p.alpha {
            return Err(EvalError::Mismatch(format!(
                "trace for {} at alpha {} against problem {} at alpha {}",
                trace.problem, trace.alpha, p.id, p.alpha
            )));
        }
        let mut elapsed = 0.0;
        for rec in &trace.records {
            elapsed += rec.seconds;
            let (max_abs, l2) = match &p.exact {
                Some(exact) => {
                    let r = grid_error(&rec.partial_sum, exact, grid)?;
                    (r.max_abs, r.l2)
                }
                None => (f64::NAN, f64::NAN),
            };
            rows.push(ConvergenceRow {
                method: trace.method,
                alpha: trace.alpha,
                iterations: rec.n,
                max_abs,
                l2,
                residual: residual(&rec.partial_sum, p, grid)?,
                seconds: elapsed,
            });
        }
    }
    Ok(rows)
}

pub const SUMMARY_HEADER: &str = "method,alpha,iterations,max_abs,l2,residual,seconds";

pub fn points_header(dimension: usize) -> &'static str {
    if dimension == 2 {
        "method,alpha,iterations,x,y,t,approx,exact,abs_error"
    } else {
        "method,alpha,iterations,x,t,approx,exact,abs_error"
    }
}

/// Rows of the per-point CSV, without the header.
pub fn write_points<W: Write>(
    w: &mut W,
    method: Method,
    alpha: f64,
    iterations: usize,
    report: &ErrorReport,
) -> io::Result<()> {
    for p in &report.points {
        write!(w, "{method},{alpha},{iterations},")?;
        if let Some(x) = p.point.x {
            write!(w, "{x},")?;
        }
        if let Some(y) = p.point.y {
            write!(w, "{y},")?;
        }
        writeln!(w, "{},{},{},{}", p.t, p.approx, p.exact, p.abs_error)?;
    }
    Ok(())
}

/// Summary CSV with header. With `timing` off the `seconds` column is 0 so
/// that repeated runs are byte-identical.
pub fn write_summary<W: Write>(w: &mut W, rows: &[ConvergenceRow], timing: bool) -> io::Result<()> {
    writeln!(w, "{SUMMARY_HEADER}")?;
    for r in rows {
        let seconds = if timing { r.seconds } else { 0.0 };
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.method, r.alpha, r.iterations, r.max_abs, r.l2, r.residual, seconds
        )?;
    }
    Ok(())
}

/// A labelled block of whitespace-separated columns.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotCurve {
    pub label: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Blocks separated by two blank lines, each introduced by `# label` and a
/// `# column names` line.
pub fn write_plot_data<W: Write>(w: &mut W, curves: &[PlotCurve]) -> io::Result<()> {
    for (i, c) in curves.iter().enumerate() {
        if i > 0 {
            writeln!(w)?;
            writeln!(w)?;
        }
        writeln!(w, "# {}", c.label)?;
        writeln!(w, "# {}", c.columns.join(" "))?;
        for row in &c.rows {
            let cells: Vec<String> = row.iter().map(f64::to_string).collect();
            writeln!(w, "{}", cells.join(" "))?;
        }
    }
    Ok(())
}
