use affine_rates::affine::{Component, ProcessSpec};
use affine_rates::cosh::{CoshLiborModel, TenorGrid};
use affine_rates::mc::{caplet_mc, floorlet_mc, mc_price, put_swaption_mc, simulate, CirScheme, SimConfig};
use num_complex::Complex;

fn flat_curve(n: usize) -> Vec<f64> {
    (1..=n).map(|k| 1.0175f64.powi(-(k as i32))).collect()
}

fn variants() -> Vec<Component<f64>> {
    vec![
        Component::BrownianDrift {
            sigma: 0.4,
            mu: 0.1,
            x0: 0.2,
        },
        Component::GaussOu {
            lambda: 0.8,
            theta: 0.3,
            sigma: 0.5,
            x0: -0.1,
        },
        Component::DoubleGammaOuBm {
            lambda: 0.5,
            theta: 0.2,
            sigma: 0.3,
            alpha_plus: 6.0,
            alpha_minus: 5.0,
            beta_plus: 2.0,
            beta_minus: 1.5,
            x0: 0.1,
        },
        Component::Cir {
            lambda: 0.6,
            theta: 0.4,
            eta: 0.25,
            x0: 0.3,
        },
        Component::CirJump {
            lambda: 0.6,
            theta: 0.4,
            eta: 0.25,
            alpha: 5.0,
            beta: 1.0,
            x0: 0.3,
        },
    ]
}

#[test]
fn deterministic_ou_path_is_constant() {
    let spec = ProcessSpec::single(
        Component::GaussOu {
            lambda: 0.7,
            theta: 1.3,
            sigma: 0.0,
            x0: 1.3,
        },
        5.0,
    )
    .unwrap();
    let paths = simulate(&spec, &[0.5, 1.0, 4.0], &SimConfig::with_paths(64, 1)).unwrap();
    assert!(paths.values.iter().all(|&v| (v - 1.3).abs() < 1e-15));
}

#[test]
fn gauss_ou_mean_matches() {
    let (lambda, theta, x0, t) = (0.8, 0.3, -0.1, 1.5);
    let spec = ProcessSpec::single(
        Component::GaussOu {
            lambda,
            theta,
            sigma: 0.5,
            x0,
        },
        5.0,
    )
    .unwrap();
    let est = mc_price(&spec, &[t], &SimConfig::with_paths(100_000, 3), |p| p.state(0)[0]).unwrap();
    let exact = theta + (x0 - theta) * (-lambda * t).exp();
    assert!(est.z_score(exact) < 3.0, "{est:?} vs {exact}");
}

fn mgf_check(scheme: CirScheme, seed: u64) {
    let t = 1.25;
    for c in variants() {
        let spec = ProcessSpec::single(c, 5.0).unwrap();
        let cfg = SimConfig {
            cir_scheme: scheme,
            ..SimConfig::with_paths(200_000, seed)
        };
        let us = [-1.0, -0.5, 0.5, 1.0, 1.5];
        let est = affine_rates::mc::mc_price_many(&spec, &[t], &cfg, us.len(), |p, out| {
            let x = p.state(0)[0];
            for (o, u) in out.iter_mut().zip(us) {
                *o = (u * x).exp();
            }
        })
        .unwrap();
        for (e, u) in est.iter().zip(us) {
            let m = spec.mgf(0.0, t, &[Complex::new(u, 0.0)], &spec.x0()).unwrap().re;
            assert!(e.z_score(m) < 3.5, "{} u={u}: {e:?} vs {m}", c.name());
        }
    }
}

#[test]
fn sample_mgf_matches_kernel_euler() {
    mgf_check(CirScheme::FullTruncationEuler, 11);
}

#[test]
fn sample_mgf_matches_kernel_exact() {
    mgf_check(CirScheme::Exact, 12);
}

#[test]
fn constant_payoff_has_zero_error() {
    let spec = ProcessSpec::single(variants()[2], 5.0).unwrap();
    let est = mc_price(&spec, &[1.0], &SimConfig::with_paths(5000, 9), |_| 2.5).unwrap();
    assert_eq!(est.estimate, 2.5);
    assert_eq!(est.std_error, 0.0);
}

#[test]
fn seed_determinism_across_thread_counts() {
    let spec = ProcessSpec::product(
        variants()
            .into_iter()
            .rev()
            .map(|c| ProcessSpec::single(c, 5.0).unwrap())
            .collect(),
        5.0,
    )
    .unwrap();
    let cfg = SimConfig::with_paths(20_000, 77);
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| mc_price(&spec, &[0.5, 2.0], &cfg, |p| p.state(1).iter().sum::<f64>().sin()).unwrap())
    };
    let a = run(1);
    let b = run(4);
    assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
    assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    assert_eq!(a.estimate.to_bits(), run(3).estimate.to_bits());
}

#[test]
fn truncated_cir_stays_nonnegative() {
    // Feller condition badly violated so the raw Euler scheme goes negative.
    let spec = ProcessSpec::single(
        Component::Cir {
            lambda: 0.3,
            theta: 0.02,
            eta: 0.6,
            x0: 0.01,
        },
        5.0,
    )
    .unwrap();
    let times: Vec<f64> = (1..=20).map(|i| 0.25 * i as f64).collect();
    let paths = simulate(&spec, &times, &SimConfig::with_paths(2000, 5)).unwrap();
    assert!(paths.values.iter().all(|&v| v >= 0.0));
    assert!(paths.values.contains(&0.0));
}

#[test]
fn standard_error_scales_with_paths() {
    let spec = ProcessSpec::single(variants()[3], 5.0).unwrap();
    for seed in [1, 2, 3] {
        let se = |n| {
            mc_price(&spec, &[2.0], &SimConfig::with_paths(n, seed), |p| p.state(0)[0])
                .unwrap()
                .std_error
        };
        let ratio = se(10_000) / se(40_000);
        assert!((ratio - 2.0).abs() < 0.4, "ratio {ratio}");
    }
}

fn skew_model() -> CoshLiborModel<f64> {
    let c = Component::DoubleGammaOuBm {
        lambda: 0.02,
        theta: 0.5,
        sigma: 0.3,
        alpha_plus: 12.0,
        alpha_minus: 10.0,
        beta_plus: 50.0,
        beta_minus: 5.0,
        x0: 0.7,
    };
    CoshLiborModel::fit(
        ProcessSpec::single(c, 10.0).unwrap(),
        TenorGrid::semiannual(20).unwrap(),
        &flat_curve(20),
    )
    .unwrap()
}

#[test]
fn rate_options_match_fourier() {
    let m = skew_model();
    let strikes = [0.025, 0.035, 0.045];
    let cfg = SimConfig::with_paths(200_000, 21);
    let flt = floorlet_mc(&m, 4, &strikes, &cfg).unwrap();
    let cpl = caplet_mc(&m, 4, &strikes, &cfg).unwrap();
    for (i, &k) in strikes.iter().enumerate() {
        assert!(flt[i].z_score(m.floorlet_price(4, k, None).unwrap()) < 3.0);
        assert!(cpl[i].z_score(m.caplet_price(4, k, None).unwrap()) < 3.0);
    }
    let sw = put_swaption_mc(&m, 4, 10, 0.035, &cfg).unwrap();
    assert!(sw.z_score(m.put_swaption_price(4, 10, 0.035, None).unwrap()) < 3.0);
}

#[test]
fn forward_measure_density_has_unit_mean() {
    let m = skew_model();
    for k in [2, 6, 12] {
        let t = m.grid().date(k);
        let terms = m.terms(t, m.u(k)).unwrap();
        let m0 = m.cosh_martingale(0.0, m.u(k), m.x0()).unwrap();
        let est = mc_price(m.spec(), &[t], &SimConfig::with_paths(100_000, 4), |p| {
            terms.value(p.state(0)[0]) / m0
        })
        .unwrap();
        assert!(est.z_score(1.0) < 3.0, "k={k} {est:?}");
    }
}
