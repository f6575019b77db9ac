use affine_rates::affine::{Component, ProcessSpec};
use affine_rates::black::{black_implied_vol, OptionKind};
use affine_rates::cosh::{
    brownian_closed_form_floorlet, brownian_closed_form_put_swaption, find_exercise_bounds, fit_u_sequence,
    CoshLiborModel, TenorGrid,
};
use affine_rates::numerics::integrate_adaptive;
use affine_rates::RatesError;
use num_complex::Complex;
use proptest::prelude::*;

fn flat_curve(n: usize) -> Vec<f64> {
    (1..=n).map(|k| 1.0175f64.powi(-(k as i32))).collect()
}

fn brownian_model() -> CoshLiborModel<f64> {
    let spec = ProcessSpec::single(
        Component::BrownianDrift {
            sigma: 1.0,
            mu: 0.0,
            x0: 0.0,
        },
        10.0,
    )
    .unwrap();
    CoshLiborModel::fit(spec, TenorGrid::semiannual(20).unwrap(), &flat_curve(20)).unwrap()
}

fn skew_spec() -> ProcessSpec<f64> {
    ProcessSpec::single(
        Component::DoubleGammaOuBm {
            lambda: 0.02,
            theta: 0.5,
            sigma: 0.3,
            alpha_plus: 12.0,
            alpha_minus: 10.0,
            beta_plus: 50.0,
            beta_minus: 5.0,
            x0: 0.7,
        },
        10.0,
    )
    .unwrap()
}

fn skew_model() -> CoshLiborModel<f64> {
    CoshLiborModel::fit(skew_spec(), TenorGrid::semiannual(20).unwrap(), &flat_curve(20)).unwrap()
}

#[test]
fn cosh_martingale_trivia() {
    let m = brownian_model();
    assert_eq!(m.cosh_martingale(3.0, 0.0, 1.7).unwrap(), 1.0);
    assert!((m.cosh_martingale(10.0, 0.3, 1.7).unwrap() - (0.3f64 * 1.7).cosh()).abs() < 1e-15);
    let u: f64 = 0.2;
    assert!((m.cosh_martingale(0.0, u, 0.0).unwrap() - (u * u * 10.0 / 2.0).exp()).abs() < 1e-14);
}

#[test]
fn brownian_fit_is_analytic() {
    let spec = ProcessSpec::single(
        Component::BrownianDrift {
            sigma: 1.0,
            mu: 0.0,
            x0: 0.0,
        },
        10.0,
    )
    .unwrap();
    let grid = TenorGrid::semiannual(20).unwrap();
    let ratios: Vec<f64> = flat_curve(20).iter().map(|p| p / flat_curve(20)[19]).collect();
    let u = fit_u_sequence(&spec, &grid, &ratios).unwrap();
    for (k, r) in ratios.iter().enumerate() {
        let exact = (2.0 * r.ln() / 10.0).sqrt();
        assert!((u[k] - exact).abs() < 1e-12, "k={k}");
    }
    let ones = vec![1.0; 20];
    assert!(fit_u_sequence(&spec, &grid, &ones).unwrap().iter().all(|&v| v == 0.0));
    let mut bad = ratios.clone();
    bad[3] = bad[2] * 1.01;
    assert!(matches!(
        fit_u_sequence(&spec, &grid, &bad),
        Err(RatesError::NonmonotoneInput(_))
    ));
}

#[test]
fn flat_curve_fit_round_trips() {
    let m = skew_model();
    let curve = flat_curve(20);
    for k in 1..=20 {
        assert!((m.discount(k).unwrap() - curve[k - 1]).abs() < 1e-10 * curve[k - 1]);
        if k > 1 {
            assert!(m.u(k) < m.u(k - 1));
        }
    }
}

#[test]
fn infeasible_curve_is_reported() {
    // the cosh mgf of a CIR with tiny mean stays close to one on the whole strip
    let narrow = ProcessSpec::single(
        Component::Cir {
            lambda: 0.5,
            theta: 0.001,
            eta: 1.0,
            x0: 0.0,
        },
        10.0,
    )
    .unwrap();
    let r = CoshLiborModel::fit(narrow, TenorGrid::semiannual(20).unwrap(), &flat_curve(20));
    assert!(matches!(r, Err(RatesError::Infeasible(_))), "{r:?}");
}

#[test]
fn bond_ratio_monotonicity() {
    let m = skew_model();
    for k in 2..=20 {
        for &x in &[-3.0, -0.5, 0.0, 0.7, 2.0, 5.0] {
            let t = 2.0;
            let a = m.cosh_martingale(t, m.u(k - 1), x).unwrap();
            let b = m.cosh_martingale(t, m.u(k), x).unwrap();
            assert!(a >= b && b >= 1.0);
        }
    }
}

#[test]
fn brownian_fourier_matches_closed_form() {
    let m = brownian_model();
    for &k in &[1usize, 3, 6, 10, 15] {
        for &strike in &[0.005, 0.02, 0.03, 0.04, 0.05, 0.07] {
            let cf = brownian_closed_form_floorlet(&m, k, strike).unwrap();
            let fo = m.floorlet_price(k, strike, None).unwrap();
            assert!(
                (cf - fo).abs() <= 1e-8 * cf.abs().max(1e-300),
                "k={k} K={strike}: {cf} vs {fo}"
            );
        }
        let cf = brownian_closed_form_put_swaption(&m, k, k + 4, 0.035).unwrap();
        let fo = m.put_swaption_price(k, k + 4, 0.035, None).unwrap();
        assert!((cf - fo).abs() <= 1e-8 * cf, "swaption α={k}: {cf} vs {fo}");
    }
}

#[test]
fn closed_form_requires_standard_brownian() {
    let m = skew_model();
    assert!(matches!(
        brownian_closed_form_floorlet(&m, 1, 0.03),
        Err(RatesError::WrongSpec(_))
    ));
}

#[test]
fn contour_independence_and_poles() {
    let m = skew_model();
    let a = m.floorlet_price(4, 0.035, Some(0.05)).unwrap();
    let b = m.floorlet_price(4, 0.035, Some(-0.8)).unwrap();
    let c = m.floorlet_price(4, 0.035, None).unwrap();
    assert!((a - b).abs() < 1e-8 * a && (a - c).abs() < 1e-8 * a, "{a} {b} {c}");
    assert!(matches!(
        m.floorlet_price(4, 0.035, Some(0.0)),
        Err(RatesError::Contour(_))
    ));
    assert!(matches!(
        m.floorlet_price(4, 0.035, Some(13.0)),
        Err(RatesError::Contour(_))
    ));
    let psi = m.terms(m.grid().date(4), m.u(4)).unwrap().psi_plus;
    assert!(matches!(
        m.floorlet_price(4, 0.035, Some(psi)),
        Err(RatesError::Contour(_))
    ));
}

#[test]
fn parity_and_limits() {
    let m = skew_model();
    for k in [1usize, 5, 9] {
        for strike in [0.02, 0.035, 0.06] {
            let f = m.floorlet_price(k, strike, None).unwrap();
            let c = m.caplet_price(k, strike, None).unwrap();
            let rhs = m.discount(k + 1).unwrap() * 0.5 * (m.forward_rate(k + 1).unwrap() - strike);
            assert!((c - f - rhs).abs() < 1e-10);
        }
    }
    let far = m.caplet_price(3, 0.5, None).unwrap();
    assert!(far.abs() < 1e-10, "{far}");
    assert!(matches!(m.caplet_price(3, 5.0, None), Err(RatesError::Numerical(_))));
    let lb = m.forward_rate_lower_bound(4, m.grid().date(3)).unwrap();
    assert_eq!(m.floorlet_price(3, lb - 1e-3, None).unwrap(), 0.0);
}

#[test]
fn h_function_matches_quadrature() {
    let m = skew_model();
    let t = 3.0;
    let u = m.u(7);
    let terms = m.terms(t, u).unwrap();
    for &(z, k1, k2) in &[
        (Complex::new(0.3, 1.5), -1.0, 2.0),
        (Complex::new(-0.7, -4.0), 0.2, 0.9),
        (Complex::new(1.1, 0.0), -2.5, 3.0),
    ] {
        let h = m.h_function(t, z, u, k1, k2).unwrap();
        let (re, _) = integrate_adaptive(
            &mut |x: f64| ((z * x).exp() * terms.derivative(x)).re,
            k1,
            k2,
            1e-14,
            1e-16,
            500,
        )
        .unwrap();
        let (im, _) = integrate_adaptive(
            &mut |x: f64| ((z * x).exp() * terms.derivative(x)).im,
            k1,
            k2,
            1e-14,
            1e-16,
            500,
        )
        .unwrap();
        let q = Complex::new(re, im);
        assert!((h - q).norm() < 1e-8 * q.norm(), "{h} vs {q}");
    }
    assert_eq!(
        m.h_function(t, Complex::new(0.3, 1.0), u, 0.5, 0.5).unwrap(),
        Complex::new(0.0, 0.0)
    );
    assert_eq!(
        m.h_function(t, Complex::new(0.3, 1.0), 0.0, -1.0, 0.5).unwrap(),
        Complex::new(0.0, 0.0)
    );
    let psi = terms.psi_plus;
    assert!(matches!(
        m.h_function(t, Complex::new(-psi, 0.0), u, -1.0, 1.0),
        Err(RatesError::Pole(_))
    ));
}

#[test]
fn brownian_bounds_are_symmetric() {
    let m = brownian_model();
    let b = m.floorlet_bounds(5, 0.03, 1e-12).unwrap();
    assert!(!b.degenerate);
    assert!((b.kappa1 + b.kappa2).abs() < 1e-8);
    let g = m.floorlet_trigger(5, 0.03).unwrap();
    assert!(g(b.kappa1).abs() < 1e-12 && g(b.kappa2).abs() < 1e-12 && g(0.5 * (b.kappa1 + b.kappa2)) > 0.0);
}

#[test]
fn swaption_one_period_equals_floorlet_functional() {
    let m = skew_model();
    // Same payoff functional in Q^T units: K̃ M^{u_{k+1}} - M^{u_k} on the same region.
    let k = 6;
    let a = m.put_swaption_payoff(k, k + 1, 0.03, 1e-12).unwrap();
    let b = m.floorlet_payoff(k, 0.03, 1e-12).unwrap();
    assert!((a.bounds.kappa1 - b.bounds.kappa1).abs() < 1e-9 && (a.bounds.kappa2 - b.bounds.kappa2).abs() < 1e-9);
    let pa = m.put_swaption_price(k, k + 1, 0.03, None).unwrap();
    let pb = m.floorlet_price(k, 0.03, None).unwrap();
    assert!((pa - pb).abs() < 1e-10 * pb);
}

#[test]
fn lower_bound_trivia() {
    let spec = ProcessSpec::single(
        Component::BrownianDrift {
            sigma: 1.0,
            mu: 0.0,
            x0: 0.0,
        },
        10.0,
    )
    .unwrap();
    let m = CoshLiborModel::new(spec, TenorGrid::semiannual(4).unwrap(), vec![0.3, 0.2, 0.2, 0.1], 0.9).unwrap();
    assert_eq!(m.forward_rate_lower_bound(3, 1.0).unwrap(), 0.0);
    let sk = skew_model();
    for k in 2..=20 {
        let t = sk.grid().date(k - 1);
        let lb = sk.forward_rate_lower_bound(k, t).unwrap();
        assert!(lb <= sk.forward_rate(k).unwrap() + 1e-12);
        // grid-scan cross-check of the infimum
        let (ta, tb) = (sk.terms(t, sk.u(k - 1)).unwrap(), sk.terms(t, sk.u(k)).unwrap());
        let scan = (-4000..=4000)
            .map(|i| i as f64 * 0.005)
            .map(|x| ((ta.log_value(x) - tb.log_value(x)).exp() - 1.0) / 0.5)
            .fold(f64::INFINITY, f64::min);
        assert!(lb <= scan + 1e-12 && scan - lb < 1e-6, "k={k}: {lb} vs {scan}");
    }
}

#[test]
fn model_json_round_trip() {
    let m = skew_model();
    let text = serde_json::to_string(&m).unwrap();
    assert!(text.contains("\"P0T\""));
    let back: CoshLiborModel<f64> = serde_json::from_str(&text).unwrap();
    assert_eq!(back, m);
}

#[test]
fn implied_vol_of_skew_caplets() {
    let m = skew_model();
    let k = 3;
    let prices: Vec<f64> = [0.02, 0.03, 0.04, 0.05]
        .iter()
        .map(|&s| m.caplet_price(k, s, None).unwrap())
        .collect();
    let fwd = m.forward_rate(k + 1).unwrap();
    let ann = m.discount(k + 1).unwrap() * 0.5;
    let vols: Vec<f64> = [0.02, 0.03, 0.04, 0.05]
        .iter()
        .zip(&prices)
        .map(|(&s, &p)| black_implied_vol(OptionKind::Call, p, fwd, s, m.grid().date(k), ann, 0.0).unwrap())
        .collect();
    assert!(vols.windows(2).all(|w| w[1] < w[0]), "{vols:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_bounds_are_roots(k in 1usize..19, strike in 0.0f64..0.08) {
        let m = skew_model();
        let b = m.floorlet_bounds(k, strike, 1e-12).unwrap();
        let g = m.floorlet_trigger(k, strike).unwrap();
        if !b.degenerate {
            prop_assert!(g(b.kappa1).abs() < 1e-12 && g(b.kappa2).abs() < 1e-12);
            prop_assert!(g(0.5 * (b.kappa1 + b.kappa2)) > 0.0);
        }
    }

    #[test]
    fn generic_bounds_helper(c in -2.0f64..2.0, s in 0.1f64..3.0, h in -1.0f64..1.0) {
        let g = move |x: f64| h - ((x - c) / s).powi(2);
        let b = find_exercise_bounds(g, 0.0, 1e-12).unwrap();
        if h > 0.0 {
            prop_assert!((b.kappa1 - (c - s * h.sqrt())).abs() < 1e-9);
            prop_assert!((b.kappa2 - (c + s * h.sqrt())).abs() < 1e-9);
        } else {
            prop_assert!(b.degenerate);
        }
    }
}
