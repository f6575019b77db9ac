use affine_rates::affine::{Component, ProcessSpec};
use affine_rates::RatesError;
use num_complex::Complex;
use proptest::prelude::*;

fn c(re: f64) -> Complex<f64> {
    Complex::new(re, 0.0)
}

fn cir() -> Component<f64> {
    Component::Cir {
        lambda: 0.026,
        theta: 0.65,
        eta: 0.5,
        x0: 3.45,
    }
}

fn cir_jump() -> Component<f64> {
    Component::CirJump {
        lambda: 0.3,
        theta: 0.4,
        eta: 0.2,
        alpha: 4.0,
        beta: 1.5,
        x0: 0.8,
    }
}

fn gauss_ou() -> Component<f64> {
    Component::GaussOu {
        lambda: 0.02,
        theta: 0.0,
        sigma: 0.3,
        x0: 0.7,
    }
}

fn skew_ou() -> Component<f64> {
    Component::DoubleGammaOuBm {
        lambda: 0.02,
        theta: 0.5,
        sigma: 0.3,
        alpha_plus: 12.0,
        alpha_minus: 10.0,
        beta_plus: 50.0,
        beta_minus: 5.0,
        x0: 0.7,
    }
}

fn variants() -> Vec<Component<f64>> {
    vec![
        Component::BrownianDrift {
            sigma: 0.8,
            mu: 0.1,
            x0: 0.2,
        },
        gauss_ou(),
        skew_ou(),
        cir(),
        cir_jump(),
    ]
}

#[test]
fn brownian_reference_value() {
    let s = ProcessSpec::single(
        Component::BrownianDrift {
            sigma: 1.0,
            mu: 0.0,
            x0: 0.0,
        },
        10.0,
    )
    .unwrap();
    let (phi, psi) = s.phi_psi_1d(1.0, c(1.0)).unwrap();
    assert!((phi.re - 0.5).abs() < 1e-15 && phi.im == 0.0);
    assert_eq!(psi, c(1.0));
}

#[test]
fn zero_time_is_identity() {
    for comp in variants() {
        let s = ProcessSpec::single(comp, 10.0).unwrap();
        let u = Complex::new(0.3, -1.7);
        let (phi, psi) = s.phi_psi_1d(0.0, u).unwrap();
        assert_eq!(phi, c(0.0));
        assert_eq!(psi, u);
    }
}

#[test]
fn domains_match_stated_strips() {
    let s = ProcessSpec::single(skew_ou(), 10.0).unwrap();
    assert_eq!(s.uniform_domain().intervals[0], (-10.0, 12.0));
    let b = ProcessSpec::single(
        Component::BrownianDrift {
            sigma: 1.0,
            mu: 0.0,
            x0: 0.0,
        },
        10.0,
    )
    .unwrap();
    let (lo, hi) = b.domain(3.0).intervals[0];
    assert!(lo == f64::NEG_INFINITY && hi == f64::INFINITY);
    let s = ProcessSpec::single(cir(), 10.0).unwrap();
    let t = 4.0;
    let bound = 0.026 / (2.0 * 0.25) / (1.0 - (-0.026f64 * t).exp());
    assert!((s.domain(t).intervals[0].1 - bound).abs() < 1e-12 * bound);
    // boundary itself is excluded
    assert!(matches!(s.phi_psi_1d(t, c(bound)), Err(RatesError::Domain(_))));
    assert!(s.phi_psi_1d(t, c(bound * 0.999)).is_ok());
}

#[test]
fn invalid_time_is_rejected() {
    let s = ProcessSpec::single(cir(), 10.0).unwrap();
    assert!(matches!(
        s.phi_psi_1d(-0.1, c(0.1)),
        Err(RatesError::InvalidTime { .. })
    ));
    assert!(matches!(
        s.phi_psi_1d(10.5, c(0.1)),
        Err(RatesError::InvalidTime { .. })
    ));
}

#[test]
fn mgf_trivial_cases() {
    let s = ProcessSpec::single(skew_ou(), 10.0).unwrap();
    let one = s.mgf(0.0, 5.0, &[c(0.0)], &[0.7]).unwrap();
    assert!((one - c(1.0)).norm() < 1e-15);
    let same = s.mgf(2.0, 2.0, &[c(0.4)], &[1.3]).unwrap();
    assert!((same - c((0.4f64 * 1.3).exp())).norm() < 1e-14);
}

#[test]
fn cir_matches_riccati_at_reference_point() {
    let s = ProcessSpec::single(cir(), 10.0).unwrap();
    let (phi, psi) = s.phi_psi_1d(10.0, c(0.01)).unwrap();
    let (p, q) = s.riccati_integrate(10.0, &[0.01]).unwrap();
    assert!((phi.re - p).abs() <= 1e-6 * p.abs());
    assert!((psi.re - q[0]).abs() <= 1e-6 * q[0].abs());
    assert_eq!(s.riccati_integrate(10.0, &[0.0]).unwrap(), (0.0, vec![0.0]));
}

#[test]
fn riccati_blowup_near_boundary() {
    // CIR with explosive ψ: start just inside the uniform domain and integrate further than
    // the process horizon allows by using a longer-horizon copy.
    let long = ProcessSpec::single(cir(), 40.0).unwrap();
    let hi = ProcessSpec::single(cir(), 10.0).unwrap().uniform_domain().intervals[0].1;
    assert!(long.riccati_integrate(40.0, &[hi * 0.99]).is_err());
}

#[test]
fn product_is_componentwise() {
    let parts: Vec<_> = variants()
        .into_iter()
        .filter(|v| v.is_nonnegative())
        .chain(variants().into_iter().filter(|v| !v.is_nonnegative()))
        .collect();
    let prod = ProcessSpec::from_components(parts.clone(), 10.0).unwrap();
    let u: Vec<_> = (0..parts.len()).map(|i| Complex::new(0.05 * i as f64, 0.3)).collect();
    let pp = prod.phi_psi(3.0, &u).unwrap();
    let mut phi = c(0.0);
    for (i, p) in parts.iter().enumerate() {
        let (a, b) = p.phi_psi(3.0, u[i]).unwrap();
        phi += a;
        assert_eq!(pp.psi[i], b);
    }
    assert_eq!(pp.phi, phi);
    assert_eq!(prod.dim(), 5);
}

#[test]
fn product_order_is_enforced() {
    let bad = ProcessSpec::from_components(vec![gauss_ou(), cir()], 10.0);
    assert!(bad.is_err());
}

#[test]
fn variance_oracles() {
    let b = ProcessSpec::single(
        Component::BrownianDrift {
            sigma: 0.7,
            mu: 0.3,
            x0: 1.0,
        },
        10.0,
    )
    .unwrap();
    assert!((b.variance(4.0).unwrap() - 0.49 * 4.0_f64).abs() < 1e-6 * 1.96);
    let s = ProcessSpec::single(gauss_ou(), 10.0).unwrap();
    let t = 7.0;
    let exact = 0.09 * (1.0 - (-0.04f64 * t).exp()) / 0.04;
    assert!((s.variance(t).unwrap() - exact).abs() < 1e-6 * exact);
}

#[test]
fn json_round_trip() {
    let prod = ProcessSpec::from_components(vec![cir(), cir_jump(), skew_ou()], 5.0).unwrap();
    let text = serde_json::to_string(&prod).unwrap();
    assert!(text.contains("\"variant\":\"Product\""));
    let back: ProcessSpec<f64> = serde_json::from_str(&text).unwrap();
    assert_eq!(back, prod);
    let single = ProcessSpec::single(cir(), 10.0).unwrap();
    let text = serde_json::to_string(&single).unwrap();
    assert!(text.contains("\"variant\":\"CIR\"") && text.contains("\"horizon\":10.0"));
    let back: ProcessSpec<f64> = serde_json::from_str(&text).unwrap();
    assert_eq!(back, single);
    let bad = r#"{"variant":"CIR","params":{"lambda":-1,"theta":0.5,"eta":0.5},"horizon":1}"#;
    assert!(serde_json::from_str::<ProcessSpec<f64>>(bad).is_err());
}

#[test]
fn single_precision_instantiation() {
    let s = ProcessSpec::single(
        Component::<f32>::Cir {
            lambda: 0.5,
            theta: 0.6,
            eta: 0.3,
            x0: 0.4,
        },
        5.0,
    )
    .unwrap();
    let (phi, psi) = s.phi_psi_1d(2.0, Complex::new(0.3f32, 0.0)).unwrap();
    let d = ProcessSpec::single(
        Component::<f64>::Cir {
            lambda: 0.5,
            theta: 0.6,
            eta: 0.3,
            x0: 0.4,
        },
        5.0,
    )
    .unwrap();
    let (phd, psd) = d.phi_psi_1d(2.0, c(0.3)).unwrap();
    assert!((phi.re as f64 - phd.re).abs() < 1e-5);
    assert!((psi.re as f64 - psd.re).abs() < 1e-5);
}

fn admissible(comp: &Component<f64>, frac: f64) -> f64 {
    let s = ProcessSpec::single(*comp, 10.0).unwrap();
    let (lo, hi) = s.uniform_domain().intervals[0];
    let lo = lo.max(-3.0);
    let hi = hi.min(3.0);
    lo + (hi - lo) * (0.02 + 0.96 * frac)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn semiflow_holds(idx in 0usize..5, s in 0.0f64..5.0, t in 0.0f64..5.0, frac in 0.0f64..1.0) {
        let comp = variants()[idx];
        let spec = ProcessSpec::single(comp, 10.0).unwrap();
        let u = c(admissible(&comp, frac));
        let (pt, qt) = spec.phi_psi_1d(t, u).unwrap();
        let (ps, qs) = spec.phi_psi_1d(s, qt).unwrap();
        let (pts, qts) = spec.phi_psi_1d(t + s, u).unwrap();
        prop_assert!((pts - pt - ps).norm() < 1e-10);
        prop_assert!((qts - qs).norm() < 1e-10);
    }

    #[test]
    fn psi_is_increasing(idx in 0usize..5, t in 0.01f64..10.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        prop_assume!((a - b).abs() > 1e-6);
        let comp = variants()[idx];
        let spec = ProcessSpec::single(comp, 10.0).unwrap();
        let (ua, ub) = (admissible(&comp, a.min(b)), admissible(&comp, a.max(b)));
        let (_, pa) = spec.phi_psi_1d(t, c(ua)).unwrap();
        let (_, pb) = spec.phi_psi_1d(t, c(ub)).unwrap();
        prop_assert!(pa.re < pb.re);
    }

    #[test]
    fn real_in_real_out_and_conjugate_symmetry(idx in 0usize..5, t in 0.0f64..10.0, frac in 0.0f64..1.0, im in -50.0f64..50.0) {
        let comp = variants()[idx];
        let spec = ProcessSpec::single(comp, 10.0).unwrap();
        let re = admissible(&comp, frac);
        let (p, q) = spec.phi_psi_1d(t, c(re)).unwrap();
        prop_assert!(p.im == 0.0 && q.im == 0.0);
        let u = Complex::new(re, im);
        let (p1, q1) = spec.phi_psi_1d(t, u).unwrap();
        let (p2, q2) = spec.phi_psi_1d(t, u.conj()).unwrap();
        prop_assert!((p1 - p2.conj()).norm() < 1e-12 * (1.0 + p1.norm()));
        prop_assert!((q1 - q2.conj()).norm() < 1e-12 * (1.0 + q1.norm()));
    }

    #[test]
    fn closed_form_matches_riccati(idx in 1usize..5, t in 0.1f64..10.0, frac in 0.05f64..0.95) {
        let comp = variants()[idx];
        let spec = ProcessSpec::single(comp, 10.0).unwrap();
        let u = admissible(&comp, frac);
        let (phi, psi) = spec.phi_psi_1d(t, c(u)).unwrap();
        let (p, q) = spec.riccati_integrate(t, &[u]).unwrap();
        prop_assert!((phi.re - p).abs() <= 1e-6 * p.abs().max(1e-8));
        prop_assert!((psi.re - q[0]).abs() <= 1e-6 * q[0].abs().max(1e-8));
    }
}
