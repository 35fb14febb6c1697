use std::fmt;
use std::time::Instant;

use super::{adomian_polys, boundary_correct, BoundaryData, Correction, DecompError};
use crate::fracterm::{Series, SeriesCaps};
use crate::problems::ProblemSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Ladm,
    Mldm,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Ladm => "ladm",
            Method::Mldm => "mldm",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SolveOptions {
    pub correction: Correction,
    pub caps: SeriesCaps,
}

/// One iteration. For LADM `u_star == u` and `nonlinear` is the Adomian
/// polynomial; for MLDM `u_star` is the corrected component and `nonlinear`
/// the Jafari polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub n: usize,
    pub u: Series,
    pub u_star: Series,
    pub nonlinear: Series,
    pub partial_sum: Series,
    pub seconds: f64,
}

impl IterationRecord {
    pub fn truncated(&self) -> bool {
        self.u.truncated()
            || self.u_star.truncated()
            || self.nonlinear.truncated()
            || self.partial_sum.truncated()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveTrace {
    pub method: Method,
    pub problem: String,
    pub alpha: f64,
    pub options: SolveOptions,
    pub records: Vec<IterationRecord>,
}

impl SolveTrace {
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn truncated(&self) -> bool {
        self.records.iter().any(IterationRecord::truncated)
    }

    /// The approximation after `n` iterations.
    pub fn approximation(&self, n: usize) -> Option<&Series> {
        self.records.get(n).map(|r| &r.partial_sum)
    }

    pub fn last(&self) -> &Series {
        &self
            .records
            .last()
            .expect("a trace always has the zeroth record")
            .partial_sum
    }

    pub fn total_seconds(&self) -> f64 {
        self.records.iter().map(|r| r.seconds).sum()
    }
}

fn zeroth_component(p: &ProblemSpec) -> Result<Series, DecompError> {
    Ok(Series::constant(p.initial.clone()).add(&p.source.frac_integral(p.alpha)?))
}

/// Laplace-Adomian decomposition: `u_0 = f + I^α h`,
/// `u_{j+1} = -I^α(Q u_j + A_j)`.
pub fn ladm_solve(
    p: &ProblemSpec,
    iterations: usize,
    opts: &SolveOptions,
) -> Result<SolveTrace, DecompError> {
    p.validate()?;
    let caps = &opts.caps;
    let mut comps: Vec<Series> = Vec::with_capacity(iterations + 1);
    let mut records = Vec::with_capacity(iterations + 1);
    let mut partial = Series::zero();
    let mut clock = Instant::now();
    let mut u = zeroth_component(p)?.truncate(caps);
    for n in 0..=iterations {
        comps.push(u.clone());
        let a = if p.nonlinear.is_empty() {
            Series::zero()
        } else {
            adomian_polys(&p.nonlinear, &comps, caps)?
                .pop()
                .expect("one polynomial per component")
        };
        partial = partial.add(&u).truncate(caps);
        let next = if n < iterations {
            Some(
                p.linear
                    .apply(&u, caps)
                    .add(&a)
                    .frac_integral(p.alpha)?
                    .neg()
                    .truncate(caps),
            )
        } else {
            None
        };
        records.push(IterationRecord {
            n,
            u: u.clone(),
            u_star: u.clone(),
            nonlinear: a,
            partial_sum: partial.clone(),
            seconds: clock.elapsed().as_secs_f64(),
        });
        clock = Instant::now();
        if let Some(next) = next {
            u = next;
        }
    }
    Ok(SolveTrace {
        method: Method::Ladm,
        problem: p.id.clone(),
        alpha: p.alpha,
        options: *opts,
        records,
    })
}

/// Modified decomposition with boundary correction. Each component is
/// corrected towards the boundary mismatch left by the previous partial sum,
/// so every partial sum satisfies the boundary data; the nonlinear term uses
/// Jafari polynomials `N(S_n) - N(S_{n-1})`.
pub fn mldm_solve(
    p: &ProblemSpec,
    iterations: usize,
    opts: &SolveOptions,
) -> Result<SolveTrace, DecompError> {
    p.validate()?;
    let data = p.boundary.as_ref().ok_or(DecompError::MissingBoundary)?;
    let caps = &opts.caps;
    let mut records = Vec::with_capacity(iterations + 1);
    let mut partial = Series::zero();
    let mut n_prev = Series::zero();
    let mut target = data.clone();
    let mut clock = Instant::now();
    let mut u = zeroth_component(p)?.truncate(caps);
    for n in 0..=iterations {
        let u_star = boundary_correct(&u, &target, &p.domain, &opts.correction)?.truncate(caps);
        partial = partial.add(&u_star).truncate(caps);
        let b = if p.nonlinear.is_empty() {
            Series::zero()
        } else {
            let cur = p.nonlinear.apply(&partial, caps)?;
            let b = cur.sub(&n_prev);
            n_prev = cur;
            b
        };
        let next = if n < iterations {
            target = data.sub(&BoundaryData::trace(&partial, &p.domain))?;
            Some(
                p.linear
                    .apply(&u_star, caps)
                    .add(&b)
                    .frac_integral(p.alpha)?
                    .neg()
                    .truncate(caps),
            )
        } else {
            None
        };
        records.push(IterationRecord {
            n,
            u: u.clone(),
            u_star,
            nonlinear: b,
            partial_sum: partial.clone(),
            seconds: clock.elapsed().as_secs_f64(),
        });
        clock = Instant::now();
        if let Some(next) = next {
            u = next;
        }
    }
    Ok(SolveTrace {
        method: Method::Mldm,
        problem: p.id.clone(),
        alpha: p.alpha,
        options: *opts,
        records,
    })
}

pub fn solve(
    method: Method,
    p: &ProblemSpec,
    iterations: usize,
    opts: &SolveOptions,
) -> Result<SolveTrace, DecompError> {
    match method {
        Method::Ladm => ladm_solve(p, iterations, opts),
        Method::Mldm => mldm_solve(p, iterations, opts),
    }
}
