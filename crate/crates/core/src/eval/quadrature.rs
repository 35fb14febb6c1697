use nalgebra::{DMatrix, SymmetricEigen};

use super::EvalError;
use crate::fracterm::gamma;

/// Gauss-Jacobi rule for the weight `(1 - s)^a (1 + s)^b` on `[-1, 1]`,
/// by the Golub-Welsch eigenvalue method. Nodes ascend.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Result<(Vec<f64>, Vec<f64>), EvalError> {
    if n == 0 || a <= -1.0 || b <= -1.0 {
        return Err(EvalError::Quadrature(format!(
            "invalid Gauss-Jacobi rule n = {n}, a = {a}, b = {b}"
        )));
    }
    let ab = a + b;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        m[(k, k)] = if k == 0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        if k + 1 < n {
            let j = kf + 1.0;
            let s = 2.0 * j + ab;
            let off =
                (4.0 * j * (j + a) * (j + b) * (j + ab) / (s * s * (s + 1.0) * (s - 1.0))).sqrt();
            m[(k, k + 1)] = off;
            m[(k + 1, k)] = off;
        }
    }
    let mu0 = 2f64.powf(ab + 1.0) * gamma(a + 1.0)? * gamma(b + 1.0)? / gamma(ab + 2.0)?;
    let eig = SymmetricEigen::new(m);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(pairs.into_iter().unzip())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureOptions {
    /// Gauss-Jacobi nodes on the panel next to the kernel singularity.
    pub nodes: usize,
    /// Gauss-Legendre nodes per graded panel.
    pub panel_nodes: usize,
    /// Number of geometrically shrinking panels towards `τ = 0`.
    pub levels: usize,
    /// Agreement required between the full rule and the half-size rule.
    pub tol: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            nodes: 64,
            panel_nodes: 16,
            levels: 40,
            tol: 1e-10,
        }
    }
}

fn composite<F: Fn(f64) -> f64>(
    f: &F,
    alpha: f64,
    t: f64,
    jacobi: &(Vec<f64>, Vec<f64>),
    legendre: &(Vec<f64>, Vec<f64>),
    levels: usize,
) -> f64 {
    // [t/2, t]: τ = 3t/4 + (t/4) s, so t - τ = (t/4)(1 - s)
    let q = 0.25 * t;
    let right: f64 = jacobi
        .0
        .iter()
        .zip(&jacobi.1)
        .map(|(s, w)| w * f(3.0 * q + q * s))
        .sum::<f64>()
        * q.powf(alpha);
    let kernel = |tau: f64| (t - tau).powf(alpha - 1.0);
    let panel = |lo: f64, hi: f64| -> f64 {
        let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        legendre
            .0
            .iter()
            .zip(&legendre.1)
            .map(|(s, w)| {
                let tau = c + h * s;
                w * kernel(tau) * f(tau)
            })
            .sum::<f64>()
            * h
    };
    let mut left = 0.0;
    let mut hi = 0.5 * t;
    for _ in 0..levels {
        let lo = 0.5 * hi;
        left += panel(lo, hi);
        hi = lo;
    }
    left += panel(0.0, hi);
    right + left
}

/// `(1/Γ(α)) ∫_0^t (t - τ)^(α-1) f(τ) dτ`.
///
/// The kernel singularity at `τ = t` is absorbed by a Gauss-Jacobi rule on
/// `[t/2, t]`; `[0, t/2]` is covered by Gauss-Legendre panels graded
/// geometrically towards 0 so that algebraic endpoint behaviour of `f`
/// costs nothing. The result is accepted when a rule of half the size
/// agrees to `tol`.
pub fn rl_integral_quadrature<F: Fn(f64) -> f64>(
    f: F,
    alpha: f64,
    t: f64,
) -> Result<f64, EvalError> {
    rl_integral_quadrature_with(f, alpha, t, &QuadratureOptions::default())
}

pub fn rl_integral_quadrature_with<F: Fn(f64) -> f64>(
    f: F,
    alpha: f64,
    t: f64,
    opts: &QuadratureOptions,
) -> Result<f64, EvalError> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(EvalError::Order(alpha));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(EvalError::Quadrature(format!("invalid upper limit {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    if opts.nodes < 2 || opts.panel_nodes < 2 {
        return Err(EvalError::Quadrature("rules need at least 2 nodes".into()));
    }
    let full = composite(
        &f,
        alpha,
        t,
        &gauss_jacobi(opts.nodes, alpha - 1.0, 0.0)?,
        &gauss_jacobi(opts.panel_nodes, 0.0, 0.0)?,
        opts.levels,
    );
    let half = composite(
        &f,
        alpha,
        t,
        &gauss_jacobi(opts.nodes / 2, alpha - 1.0, 0.0)?,
        &gauss_jacobi(opts.panel_nodes / 2, 0.0, 0.0)?,
        opts.levels,
    );
    if !full.is_finite() || (full - half).abs() > opts.tol * full.abs().max(1.0) {
        return Err(EvalError::NotConverged {
            estimate: full,
            alternate: half,
            tol: opts.tol,
        });
    }
    Ok(full / gamma(alpha)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        let (x, w) = gauss_jacobi(8, 0.0, 0.0).unwrap();
        let int: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((int - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_weights_sum_to_moment() {
        let (_, w) = gauss_jacobi(64, -0.5, 0.0).unwrap();
        // ∫ (1-s)^-1/2 ds over [-1, 1] = 2 sqrt 2
        assert!((w.iter().sum::<f64>() - 2.0 * 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn elementary_integrals() {
        assert!((rl_integral_quadrature(|_| 1.0, 1.0, 2.0).unwrap() - 2.0).abs() < 1e-12);
        assert!((rl_integral_quadrature(|s| s * s, 1.0, 1.0).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        let expected = 1.0 / gamma(2.5).unwrap();
        assert!((rl_integral_quadrature(|s| s, 0.5, 1.0).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn degree_eight_polynomial_to_1e9() {
        let f = |s: f64| (0..=8).map(|k| (k as f64 + 1.0) * s.powi(k)).sum::<f64>();
        for alpha in [0.2, 0.6, 1.0] {
            let t: f64 = 1.5;
            let exact: f64 = (0..=8)
                .map(|k| {
                    let k = k as f64;
                    (k + 1.0) * gamma(k + 1.0).unwrap() / gamma(k + 1.0 + alpha).unwrap()
                        * t.powf(k + alpha)
                })
                .sum();
            let q = rl_integral_quadrature(f, alpha, t).unwrap();
            assert!((q - exact).abs() < 1e-9, "{alpha}: {q} vs {exact}");
        }
    }

    #[test]
    fn oscillatory_integrand_beyond_budget_is_reported() {
        let r = rl_integral_quadrature(|s| (400.0 * s).sin(), 0.5, 1.0);
        assert!(matches!(r, Err(EvalError::NotConverged { .. })));
    }
}
