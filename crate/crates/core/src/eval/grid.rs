use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::symx::{Domain, Interval, Point};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    /// Points per spatial axis.
    pub nx: usize,
    pub nt: usize,
    pub t_max: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            nx: 41,
            nt: 21,
            t_max: 1.0,
        }
    }
}

/// Tensor grid of uniform spatial points and uniform times on `[0, t_max]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub xs: Vec<f64>,
    pub ys: Option<Vec<f64>>,
    pub ts: Vec<f64>,
}

fn linspace(iv: Interval, n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| {
            if i + 1 == n {
                iv.hi
            } else {
                iv.lo + (iv.hi - iv.lo) * (i as f64 / last)
            }
        })
        .collect()
}

impl Grid {
    pub fn new(domain: &Domain, spec: &GridSpec) -> Result<Grid, EvalError> {
        if spec.nx < 2 || spec.nt < 2 {
            return Err(EvalError::Grid(format!(
                "grid counts must be at least 2 (got {} x {})",
                spec.nx, spec.nt
            )));
        }
        if !(spec.t_max > 0.0 && spec.t_max.is_finite()) {
            return Err(EvalError::Grid(format!(
                "t_max must be positive (got {})",
                spec.t_max
            )));
        }
        Ok(Grid {
            xs: linspace(domain.x, spec.nx),
            ys: domain.y.map(|iy| linspace(iy, spec.nx)),
            ts: linspace(Interval::new(0.0, spec.t_max), spec.nt),
        })
    }

    pub fn default_for(domain: &Domain) -> Grid {
        Grid::new(domain, &GridSpec::default()).expect("default grid is valid")
    }

    pub fn dimension(&self) -> usize {
        if self.ys.is_some() {
            2
        } else {
            1
        }
    }

    /// Spatial points, `x` outermost.
    pub fn space_points(&self) -> Vec<Point> {
        match &self.ys {
            None => self.xs.iter().map(|&x| Point::x(x)).collect(),
            Some(ys) => self
                .xs
                .iter()
                .flat_map(|&x| ys.iter().map(move |&y| Point::xy(x, y)))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.xs.len() * self.ys.as_ref().map_or(1, Vec::len) * self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_shape() {
        let g = Grid::default_for(&Domain::line(0.0, 2.0));
        assert_eq!(g.xs.len(), 41);
        assert_eq!(g.ts.len(), 21);
        assert_eq!(g.xs[20], 1.0);
        assert_eq!(*g.xs.last().unwrap(), 2.0);
        assert_eq!(g.len(), 41 * 21);
    }

    #[test]
    fn small_counts_rejected() {
        let spec = GridSpec {
            nx: 1,
            ..GridSpec::default()
        };
        assert!(Grid::new(&Domain::line(0.0, 1.0), &spec).is_err());
    }
}
