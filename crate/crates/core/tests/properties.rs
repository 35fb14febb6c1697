use fracdecomp::decomp::{
    adomian_polys, boundary_correct, jafari_polys, BoundaryData, Correction, Factor, NonlinearOp,
};
use fracdecomp::eval::{grid_error, Grid, GridSpec};
use fracdecomp::fracterm::{Series, SeriesCaps, TimeTerm};
use fracdecomp::symx::{Domain, Expr, Interval, Point, Poly, Var};
use proptest::prelude::*;

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![Just(Expr::x()), (-2.0..2.0f64).prop_map(Expr::c),];
    leaf.prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            inner.clone().prop_map(Expr::sin),
            inner.clone().prop_map(Expr::cos),
            inner.clone().prop_map(|e| (e * Expr::c(0.3)).exp()),
            (inner.clone(), 2u32..4).prop_map(|(e, k)| e.pow(f64::from(k))),
            (prop::sample::select(vec![0.5, 1.5, 2.5]))
                .prop_map(|e| (Expr::x() + Expr::c(1.5)).pow(e)),
        ]
    })
}

fn coefficient() -> impl Strategy<Value = Poly> {
    prop::collection::vec(-2.0..2.0f64, 5).prop_map(|c| {
        let x = Poly::var(Var::X);
        let basis = [
            Poly::one(),
            x.clone(),
            x.mul(&x),
            Poly::sin(&x),
            Poly::exp(&x),
        ];
        basis
            .iter()
            .zip(c)
            .fold(Poly::zero(), |acc, (b, k)| acc.add(&b.scale(k)))
    })
}

/// Series whose positive exponents are at least 1, so Caputo derivatives of
/// order up to 1 exist.
fn series(max_terms: usize) -> impl Strategy<Value = Series> {
    let mu = prop_oneof![Just(0.0), 1.0..4.0f64];
    prop::collection::vec((mu, coefficient()), 1..=max_terms).prop_map(|terms| {
        Series::from_terms(
            terms
                .into_iter()
                .map(|(mu, coeff)| TimeTerm { mu, coeff })
                .collect(),
        )
    })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn simplify_is_idempotent(e in expr()) {
        let once = e.simplify();
        prop_assert_eq!(once.simplify(), once);
    }

    #[test]
    fn simplify_preserves_values(e in expr(), x in 0.05..1.0f64) {
        let p = Point::x(x);
        let (a, b) = (e.eval(&p).unwrap(), e.simplify().eval(&p).unwrap());
        prop_assert!(close(a, b, 1e-9), "{} vs {}", a, b);
    }

    #[test]
    fn derivative_matches_finite_difference(e in expr(), x in 0.1..0.9f64) {
        let h = 1e-5;
        let f = |x: f64| e.eval(&Point::x(x)).unwrap();
        let fd = (f(x + h) - f(x - h)) / (2.0 * h);
        let d = e.diff(Var::X).eval(&Point::x(x)).unwrap();
        let scale = 1.0 + f(x + h).abs().max(f(x - h).abs());
        prop_assert!((fd - d).abs() <= 1e-5 * scale.max(d.abs()), "{} vs {}", fd, d);
    }

    #[test]
    fn integrals_compose(u in series(5), a in 0.05..1.0f64, b in 0.05..1.0f64) {
        let twice = u.frac_integral(b).unwrap().frac_integral(a).unwrap();
        prop_assert!(twice.max_coeff_diff(&u.frac_integral(a + b).unwrap()) <= 1e-12);
    }

    #[test]
    fn caputo_inverts_integral(u in series(5), a in 0.05..=1.0f64) {
        let back = u.frac_integral(a).unwrap().caputo(a).unwrap();
        prop_assert!(back.max_coeff_diff(&u) <= 1e-12);
        let forth = u.caputo(a).unwrap().frac_integral(a).unwrap();
        prop_assert!(forth.max_coeff_diff(&u.without_initial_value()) <= 1e-12);
    }

    #[test]
    fn adomian_square_is_cauchy_product(comps in prop::collection::vec(series(3), 1..5)) {
        let square = NonlinearOp::none().with(1.0, vec![Factor::u(2)]);
        let polys = adomian_polys(&square, &comps, &SeriesCaps::default()).unwrap();
        for (k, a) in polys.iter().enumerate() {
            let mut want = Series::zero();
            for i in 0..=k {
                want = want.add(&comps[i].mul(&comps[k - i]));
            }
            prop_assert!(a.max_coeff_diff(&want) <= 1e-12, "k = {}", k);
        }
    }

    #[test]
    fn jafari_sums_telescope(comps in prop::collection::vec(series(3), 1..4)) {
        let op = NonlinearOp::none()
            .with(1.0, vec![Factor::u(1), Factor::d(1, Var::X)])
            .with(-0.5, vec![Factor::u(2)]);
        let caps = SeriesCaps::default();
        let polys = jafari_polys(&op, &comps, &caps).unwrap();
        let total = polys.iter().fold(Series::zero(), |acc, b| acc.add(b));
        let sum = comps.iter().fold(Series::zero(), |acc, u| acc.add(u));
        prop_assert!(total.max_coeff_diff(&op.apply(&sum, &caps).unwrap()) <= 1e-12);
    }

    #[test]
    fn correction_hits_boundary_data(
        u in series(4),
        lo_data in series(2),
        hi_data in series(2),
        lo in -1.0..0.5f64,
        width in 0.5..3.0f64,
    ) {
        let hi = lo + width;
        let domain = Domain::line(lo, hi);
        let strip = |s: &Series| {
            Series::from_terms(
                s.terms()
                    .iter()
                    .map(|t| TimeTerm { mu: t.mu, coeff: t.coeff.subst(Var::X, 0.0) })
                    .collect(),
            )
        };
        let (g0, g1) = (strip(&lo_data), strip(&hi_data));
        let data = BoundaryData::line(g0.clone(), g1.clone());
        let fixed = boundary_correct(&u, &data, &domain, &Correction::default()).unwrap();
        for t in [0.0, 0.4, 1.0] {
            for (at, g) in [(lo, &g0), (hi, &g1)] {
                let p = Point::x(at);
                let (got, want) = (fixed.eval(&p, t).unwrap(), g.eval(&p, t).unwrap());
                prop_assert!(close(got, want, 1e-12), "x = {}: {} vs {}", at, got, want);
            }
        }
    }

    #[test]
    fn grid_error_is_symmetric(a in series(3), b in series(3)) {
        let grid = Grid::new(
            &Domain::rect(Interval::new(0.0, 1.0), Interval::new(0.0, 2.0)),
            &GridSpec { nx: 5, nt: 4, t_max: 1.0 },
        )
        .unwrap();
        let ab = grid_error(&a, &b, &grid).unwrap();
        let ba = grid_error(&b, &a, &grid).unwrap();
        prop_assert_eq!(ab.max_abs, ba.max_abs);
        prop_assert_eq!(ab.l2, ba.l2);
        prop_assert!(ab.l2 <= ab.max_abs);
    }
}
