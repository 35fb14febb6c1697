use std::collections::BTreeMap;

use super::{EvalError, Grid};
use crate::fracterm::{Series, SeriesCaps};
use crate::problems::ProblemSpec;
use crate::symx::Point;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointError {
    pub point: Point,
    pub t: f64,
    pub approx: f64,
    pub exact: f64,
    pub abs_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    pub points: Vec<PointError>,
    pub max_abs: f64,
    /// Root mean square over the grid.
    pub l2: f64,
}

/// Pointwise `|approx - exact|` over the grid, spatial points outermost.
pub fn grid_error(approx: &Series, exact: &Series, grid: &Grid) -> Result<ErrorReport, EvalError> {
    let mut points = Vec::with_capacity(grid.len());
    let mut max_abs: f64 = 0.0;
    let mut sq = 0.0;
    for p in grid.space_points() {
        let a = approx.eval_times(&p, &grid.ts)?;
        let e = exact.eval_times(&p, &grid.ts)?;
        for ((&t, va), ve) in grid.ts.iter().zip(a).zip(e) {
            let d = (va - ve).abs();
            max_abs = max_abs.max(d);
            sq += d * d;
            points.push(PointError {
                point: p,
                t,
                approx: va,
                exact: ve,
                abs_error: d,
            });
        }
    }
    let l2 = (sq / points.len() as f64).sqrt();
    Ok(ErrorReport {
        points,
        max_abs,
        l2: l2.min(max_abs),
    })
}

/// Sup over the grid of `|D^α u + Q u + N u - h|`. The linear part is formed
/// symbolically, the nonlinear part pointwise from derivative values.
pub fn residual(approx: &Series, p: &ProblemSpec, grid: &Grid) -> Result<f64, EvalError> {
    let caps = SeriesCaps::default();
    let linear = approx
        .caputo(p.alpha)?
        .add(&p.linear.apply(approx, &caps))
        .sub(&p.source);
    let keys = p.nonlinear.derivatives();
    let derivs: Vec<Series> = keys
        .iter()
        .map(|&(order, var)| approx.spatial_apply(order, var))
        .collect();
    let mut worst: f64 = 0.0;
    for pt in grid.space_points() {
        let lin = linear.eval_times(&pt, &grid.ts)?;
        let values = derivs
            .iter()
            .map(|d| d.eval_times(&pt, &grid.ts))
            .collect::<Result<Vec<_>, _>>()?;
        for (i, l) in lin.iter().enumerate() {
            let mut r = *l;
            if !keys.is_empty() {
                let table: BTreeMap<_, f64> =
                    keys.iter().zip(&values).map(|(k, v)| (*k, v[i])).collect();
                r += p.nonlinear.eval_pointwise(&table);
            }
            worst = worst.max(r.abs());
        }
    }
    Ok(worst)
}
