use orbcert::certify::{select_radius, Bounds};
use orbcert::interval::{Bound, Interval, IntervalMatrix};
use orbcert::pdcurve::{
    analytic_beta, ball_nested, build_extended_df, build_extended_f, certify_curve, certify_window,
    extended_newton, extended_residual_f64, extended_seeds, follow_branch, node_solve,
    patch_curves, uniform_bounds, CurveError, CurveOptions, End, Expansion, Split, Window,
};
use proptest::prelude::*;

/// The `β < −4` root of `β² − κβ − 2κ = 0` together with its fixed point.
fn p1_seed(kappa: f64) -> Vec<f64> {
    let (beta, _) = analytic_beta(kappa).unwrap();
    vec![(kappa / beta - 1.0).ln(), beta]
}

#[test]
fn analytic_point_zeroes_the_extended_map() {
    // β = −3, κ = −9, x = ln 2: κ eˣ/(1 + eˣ)² = −2.
    let w = [2f64.ln(), -3.0];
    let window = Window::new(-9.0, -8.0).unwrap();
    let r = extended_residual_f64(1, &window, &w, -1.0);
    assert!(r.iter().all(|v| v.abs() < 1e-15), "{r:?}");
    let enc = build_extended_f(
        1,
        &window,
        &[
            Interval::from_decimal("0.6931471805599453").unwrap(),
            Interval::point(-3.0),
        ],
        Interval::point(-1.0),
        Split::Full,
        None,
    )
    .unwrap();
    assert!(enc[1].contains(0.0) || enc[1].mag() < 1e-15);
}

#[test]
fn kappa_norm_on_minus_16_minus_13() {
    let w = Window::new(-16.0, -13.0).unwrap();
    assert_eq!(w.kappa_seq().norm(), Interval::point(16.0));
}

#[test]
fn unsupported_period_is_rejected() {
    let w = Window::new(-16.0, -13.0).unwrap();
    let err = build_extended_f(
        3,
        &w,
        &[Interval::ZERO; 6],
        Interval::ZERO,
        Split::Full,
        None,
    )
    .unwrap_err();
    assert_eq!(err, CurveError::UnsupportedPeriod(3));
}

#[test]
fn p1_nodes_follow_the_analytic_branch() {
    let w = Window::new(-12.0, -10.0).unwrap();
    let c = node_solve(1, &w, 16, 10, &p1_seed(-12.0), End::Left).unwrap();
    assert_eq!(c.node_solutions.len(), 17);
    for s in &c.node_solutions {
        let (beta, _) = analytic_beta(w.kappa_at(s.alpha)).unwrap();
        assert!((s.w[1] - beta).abs() < 1e-12, "{} vs {beta}", s.w[1]);
    }
}

#[test]
fn single_node_is_a_pointwise_solve() {
    let w = Window::new(-12.0, -10.0).unwrap();
    let c = node_solve(1, &w, 0, 10, &p1_seed(-11.0), End::Left).unwrap();
    assert_eq!(c.node_solutions.len(), 1);
    assert_eq!(c.w_bar[1].degree(), 0);
    let (beta, _) = analytic_beta(-11.0).unwrap();
    assert!((c.w_bar[1].eval_f64(0.3) - beta).abs() < 1e-12);
}

#[test]
fn p1_window_certifies_and_contains_analytic_root() {
    let w = Window::new(-12.0, -10.0).unwrap();
    let c = node_solve(1, &w, 16, 10, &p1_seed(-12.0), End::Left).unwrap();
    let cert = certify_curve(&c, 1e-2);
    assert!(cert.verified, "{:?} {:?}", cert.bounds, cert.reason);
    assert!(cert.r_star().unwrap() <= 1e-6);
    for i in 0..10 {
        let alpha = -1.0 + 2.0 * i as f64 / 9.0;
        let kappa = w.kappa_at(alpha);
        let (beta, _) = analytic_beta(kappa).unwrap();
        assert!(
            cert.beta_enclosure(alpha).unwrap().contains(beta),
            "kappa {kappa}"
        );
    }
}

#[test]
fn p1_halves_patch() {
    let opts = CurveOptions::default();
    let a = certify_window(
        1,
        &Window::new(-12.0, -11.0).unwrap(),
        &p1_seed(-12.0),
        End::Left,
        &opts,
    )
    .unwrap();
    let b = certify_window(
        1,
        &Window::new(-11.0, -10.0).unwrap(),
        &p1_seed(-11.0),
        End::Left,
        &opts,
    )
    .unwrap();
    assert_eq!((a.len(), b.len()), (1, 1));
    assert!(a[0].verified && b[0].verified);
    assert!(patch_curves(&a[0], &b[0]));
    assert!(!patch_curves(&b[0], &a[0]));
}

#[test]
fn identical_balls_nest() {
    let c = [Interval::point(1.0), Interval::point(-2.0)];
    assert!(ball_nested(&c, 1e-3, &c, 1e-3).is_ok());
    assert!(ball_nested(&c, 2e-3, &c, 1e-3).is_err());
}

#[test]
fn constant_interpolant_has_no_remainder() {
    let chi = [Interval::point(-1.2)];
    let e = Expansion::new(&chi, 10).unwrap();
    let w = Window::new(-12.0, -10.0).unwrap();
    let rem = build_extended_f(
        1,
        &w,
        &[chi[0], Interval::point(-9.0)],
        Interval::ZERO,
        Split::Remainder,
        Some(&e),
    )
    .unwrap();
    assert!(rem.iter().all(|r| *r == Interval::ZERO), "{rem:?}");
}

#[test]
fn z2_is_monotone_in_r() {
    let w = Window::new(-16.0, -13.0).unwrap();
    let seeds = extended_seeds(2, -16.0, 200).unwrap();
    let c = node_solve(2, &w, 16, 10, &seeds[0], End::Left).unwrap();
    let mut last = 0.0;
    for r in [1e-6, 1e-3, 1e-2, 1.0, 10.0] {
        let z2 = uniform_bounds(&c, r).unwrap().z2.hi();
        assert!(z2 >= last);
        last = z2;
    }
}

#[test]
fn p2_seeds_at_minus_16() {
    let seeds = extended_seeds(2, -16.0, 200).unwrap();
    let expected = [-12.74233677, -9.20305333, -6.79694667, -3.25766323];
    assert_eq!(seeds.len(), 4, "{seeds:?}");
    for (s, b) in seeds.iter().zip(expected) {
        assert!((s[3] - b).abs() < 1e-7, "{s:?}");
    }
}

#[test]
fn p2_window_minus_16_minus_13_certifies() {
    let w = Window::new(-16.0, -13.0).unwrap();
    for seed in extended_seeds(2, -16.0, 200).unwrap() {
        let c = node_solve(2, &w, 16, 10, &seed, End::Left).unwrap();
        assert!(c.max_node_residual < 1e-12);
        for s in &c.node_solutions {
            let r = extended_residual_f64(2, &w, &s.w, s.alpha);
            assert!(r.iter().map(|v| v.abs()).sum::<f64>() < 1e-12);
        }
        let cert = certify_curve(&c, 1e-2);
        assert!(cert.verified);
        assert!(cert.r_star().unwrap() <= 1e-3);
    }
}

/// Pointwise bounds for the extended system frozen at `α`.
fn frozen_radius(cert: &orbcert::pdcurve::CurveCertificate, alpha: f64) -> f64 {
    let c = &cert.candidate;
    let w = c.window;
    let wbar = c.eval_f64(alpha);
    let sol = extended_newton(2, &w, &wbar, alpha).unwrap();
    let n = 4;
    let x: Vec<Interval> = wbar.iter().copied().map(Interval::point).collect();
    let f = build_extended_f(2, &w, &x, Interval::point(alpha), Split::Full, None).unwrap();
    let a = IntervalMatrix::from_points(n, &sol.inverse);
    let y = a
        .mul_vec(&orbcert::interval::IntervalVector::new(f))
        .norm1();
    let df = build_extended_df(2, &w, &x, Interval::point(alpha)).unwrap();
    let z1 = a
        .mul_mat(&IntervalMatrix::from_fn(n, |i, j| df[i * n + j]))
        .identity_minus()
        .op_norm1();
    let b = Bounds {
        y,
        z1,
        z2: cert.bounds.unwrap().z2,
    };
    select_radius(&b, Bound::Finite(1e-2)).unwrap().r_star
}

#[test]
fn uniform_radius_dominates_pointwise() {
    let w = Window::new(-16.0, -13.0).unwrap();
    let seed = &extended_seeds(2, -16.0, 200).unwrap()[1];
    let cert = certify_curve(&node_solve(2, &w, 16, 10, seed, End::Left).unwrap(), 1e-2);
    for alpha in [-0.9, -0.4, 0.0, 0.5, 0.95] {
        assert!(frozen_radius(&cert, alpha) <= 2.0 * cert.r_star().unwrap());
    }
}

#[test]
fn p2_chain_covers_minus_31_minus_13() {
    let windows: Vec<Window> = (0..6)
        .map(|j| Window::new(-16.0 - 3.0 * j as f64, -13.0 - 3.0 * j as f64).unwrap())
        .collect();
    for seed in extended_seeds(2, -16.0, 200).unwrap() {
        let certs = follow_branch(2, &windows, -16.0, &seed, &CurveOptions::default()).unwrap();
        assert!(orbcert::pdcurve::chain_covers(&certs, -31.0, -13.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn split_identity(x0 in -4.0f64..4.0, x1 in -4.0f64..4.0, u in -3.0f64..3.0, beta in -15.0f64..-1.0,
                      c0 in -3.0f64..3.0, c1 in -3.0f64..3.0, alpha in -1.0f64..1.0) {
        let w = Window::new(-16.0, -13.0).unwrap();
        let e = Expansion::new(&[Interval::point(c0), Interval::point(c1)], 10).unwrap();
        let pt: Vec<Interval> = [x0, x1, u, beta].iter().copied().map(Interval::point).collect();
        let a = Interval::point(alpha);
        let full = build_extended_f(2, &w, &pt, a, Split::Full, None).unwrap();
        let poly = build_extended_f(2, &w, &pt, a, Split::Poly, Some(&e)).unwrap();
        let rem = build_extended_f(2, &w, &pt, a, Split::Remainder, Some(&e)).unwrap();
        for i in 0..4 {
            let sum = poly[i] + rem[i];
            prop_assert!(full[i].intersect(&sum).is_some(), "{i}: {:?} vs {:?}", full[i], sum);
        }
    }
}
