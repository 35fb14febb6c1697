use std::fmt;

use super::{manufacture_source, ProblemError, ProblemSpec};
use crate::decomp::{BoundaryData, Face};
use crate::fracterm::Series;
use crate::symx::{poly_equal_sampled, Poly};

pub const CONSISTENCY_SAMPLES: usize = 64;
pub const CONSISTENCY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    Source,
    Initial,
    Boundary(Face),
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckKind::Source => f.write_str("source"),
            CheckKind::Initial => f.write_str("initial"),
            CheckKind::Boundary(face) => write!(f, "boundary {}", face.name()),
        }
    }
}

/// `residual` is the stated data minus what the exact solution forces.
#[derive(Clone, Debug, PartialEq)]
pub struct ConsistencyCheck {
    pub kind: CheckKind,
    pub consistent: bool,
    pub residual: Series,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConsistencyReport {
    pub id: String,
    pub alpha: f64,
    pub checks: Vec<ConsistencyCheck>,
}

impl ConsistencyReport {
    pub fn is_consistent(&self) -> bool {
        self.checks.iter().all(|c| c.consistent)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConsistencyCheck> {
        self.checks.iter().filter(|c| !c.consistent)
    }

    pub fn check(&self, kind: CheckKind) -> Option<&ConsistencyCheck> {
        self.checks.iter().find(|c| c.kind == kind)
    }

    /// `consistent` or `inconsistent (source, initial)`.
    pub fn status(&self) -> String {
        let bad: Vec<String> = self.failures().map(|c| c.kind.to_string()).collect();
        if bad.is_empty() {
            "consistent".to_string()
        } else {
            format!("inconsistent ({})", bad.join(", "))
        }
    }
}

impl fmt::Display for ConsistencyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} at alpha = {}: {}",
            self.id,
            self.alpha,
            self.status()
        )?;
        for c in self.failures() {
            writeln!(f, "  {}: stated - forced = {}", c.kind, c.residual)?;
        }
        Ok(())
    }
}

fn vanishes(residual: &Series, p: &ProblemSpec) -> Result<bool, ProblemError> {
    let zero = Poly::zero();
    for t in residual.terms() {
        if !poly_equal_sampled(
            &t.coeff,
            &zero,
            &p.domain,
            CONSISTENCY_SAMPLES,
            CONSISTENCY_TOL,
        )? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Compares the stated source, initial and boundary data of `p` against
/// those forced by its exact solution.
pub fn validate_consistency(p: &ProblemSpec) -> Result<ConsistencyReport, ProblemError> {
    let exact = p.exact.as_ref().ok_or(ProblemError::MissingExact)?;
    let mut checks = Vec::new();
    let mut push = |kind, residual: Series| -> Result<(), ProblemError> {
        let consistent = vanishes(&residual, p)?;
        checks.push(ConsistencyCheck {
            kind,
            consistent,
            residual,
        });
        Ok(())
    };
    let forced = manufacture_source(exact, &p.linear, &p.nonlinear, p.alpha)?;
    push(CheckKind::Source, p.source.sub(&forced))?;
    push(
        CheckKind::Initial,
        Series::constant(p.initial.sub(&exact.initial_value())),
    )?;
    if let Some(bd) = &p.boundary {
        let traced = BoundaryData::trace(exact, &p.domain);
        for (face, stated) in bd.faces() {
            let forced = traced.face(face).expect("same dimension");
            push(CheckKind::Boundary(face), stated.sub(forced))?;
        }
    }
    Ok(ConsistencyReport {
        id: p.id.clone(),
        alpha: p.alpha,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{builtin, SourceMode};

    fn report(id: &str, alpha: f64) -> ConsistencyReport {
        validate_consistency(&builtin(id, alpha, SourceMode::PaperLiteral).unwrap()).unwrap()
    }

    #[test]
    fn consistent_transcriptions() {
        for id in ["p2", "p5", "p6"] {
            for alpha in [0.5, 1.0] {
                assert!(report(id, alpha).is_consistent(), "{id} {alpha}");
            }
        }
        assert!(report("p7", 1.0).is_consistent());
        assert!(!report("p7", 0.5).is_consistent());
    }

    #[test]
    fn problem_four_initial_condition_conflicts() {
        let r = report("p4", 0.5);
        assert!(!r.check(CheckKind::Initial).unwrap().consistent);
        assert!(!r.check(CheckKind::Source).unwrap().consistent);
        assert!(r.check(CheckKind::Boundary(Face::XLo)).unwrap().consistent);
        assert_eq!(r.status(), "inconsistent (source, initial)");
    }

    #[test]
    fn manufactured_specs_are_consistent() {
        for id in crate::problems::builtin_ids() {
            let p = builtin(id, 0.7, SourceMode::Manufactured).unwrap();
            assert!(validate_consistency(&p).unwrap().is_consistent(), "{id}");
        }
    }
}
