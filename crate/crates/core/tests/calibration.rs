use affine_rates::affine::{Component, ProcessSpec};
use affine_rates::black::OptionKind;
use affine_rates::calibration::{
    calibrate_inflation, calibrate_nominal, CalibrationConfig, Market, Objective, StopReason,
};
use affine_rates::inflation::{default_tilde_v, fit_ubar_range, FourierOptions, InflationModel, RootPolicy};
use affine_rates::market::{synthetic_snapshot, CapletVol, CurvePoint, MarketSnapshot};
use affine_rates::RatesError;

const M: usize = 2;
const CAPLET_STRIKES: [f64; 4] = [0.02, 0.03, 0.04, 0.05];
const INFLATION_STRIKES: [f64; 4] = [-0.01, 0.01, 0.02, 0.04];

fn truth() -> InflationModel<f64> {
    let mut comps = vec![Component::Cir {
        lambda: 0.026,
        theta: 0.65,
        eta: 0.5,
        x0: 3.45,
    }];
    for i in 1..=M {
        let s = i as f64;
        comps.push(Component::CirJump {
            lambda: 0.2 + 0.05 * s,
            theta: 0.015,
            eta: 0.1,
            alpha: 15.0 + s,
            beta: 0.25,
            x0: 0.015 + 0.002 * s,
        });
    }
    for i in 1..=M {
        comps.push(Component::DoubleGammaOuBm {
            lambda: 0.4 + 0.1 * i as f64,
            theta: 0.0,
            sigma: 0.03,
            alpha_plus: 50.0,
            alpha_minus: 45.0,
            beta_plus: 0.6,
            beta_minus: 0.45,
            x0: 0.005,
        });
    }
    let spec = ProcessSpec::from_components(comps, M as f64).unwrap();
    let d: Vec<f64> = (1..=2 * M)
        .map(|k| (-(0.015 + 0.002 * k as f64) * k as f64 / 2.0).exp())
        .collect();
    let nom = InflationModel::fit_nominal(spec, M, None, &d).unwrap();
    let ilb: Vec<f64> = (1..=2 * M)
        .map(|k| d[k - 1] / nom.p0t() * 1.02f64.powf(k as f64 / 2.0))
        .collect();
    let tv = default_tilde_v(&nom.layout().tilde_u, 0.08);
    nom.fit_vbar_sequence(&tv, &ilb, RootPolicy::Positive).unwrap().0
}

fn price_config() -> CalibrationConfig {
    CalibrationConfig {
        nominal_objective: Objective::MsePrice,
        ..CalibrationConfig::default()
    }
}

fn snapshot(cfg: &CalibrationConfig) -> MarketSnapshot {
    synthetic_snapshot(&truth(), &CAPLET_STRIKES, &INFLATION_STRIKES, &cfg.fourier()).unwrap()
}

#[test]
fn config_json() {
    let cfg = CalibrationConfig::default();
    let text = serde_json::to_string(&cfg).unwrap();
    let back = CalibrationConfig::from_json(&text).unwrap();
    assert_eq!(serde_json::to_string(&back).unwrap(), text);
    assert_eq!(cfg.budget, 2000);
    let partial = CalibrationConfig::from_json(r#"{"budget": 10, "nominal_objective": "mse_price"}"#).unwrap();
    assert_eq!(partial.budget, 10);
    assert_eq!(partial.nominal_objective, Objective::MsePrice);
    assert!(CalibrationConfig::from_json(r#"{"budget": 0}"#).is_err());
    assert!(CalibrationConfig::from_json(r#"{"budgett": 10}"#).is_err());
    let bad = r#"{"nominal_bounds": {"alpha": [30.0, 40.0]}}"#;
    assert!(matches!(
        CalibrationConfig::from_json(bad),
        Err(RatesError::InvalidParameter(_))
    ));
}

#[test]
fn zero_volatility_quotes_are_rejected() {
    let mut snap = MarketSnapshot {
        curve: (1..=4)
            .map(|k| CurvePoint {
                maturity_years: k as f64 / 2.0,
                discount: 1.0175f64.powi(-k),
            })
            .collect(),
        ..Default::default()
    };
    snap.caplet_vols.push(CapletVol {
        expiry_years: 0.5,
        strike: 0.03,
        vol: 0.0,
    });
    let err = calibrate_nominal(&snap, &CalibrationConfig::default()).unwrap_err();
    assert!(matches!(err, RatesError::OutOfBounds(_)), "{err:?}");
}

#[test]
fn snapshot_csv_round_trip() {
    let cfg = CalibrationConfig::default();
    let snap = snapshot(&cfg);
    let dir = tempfile::tempdir().unwrap();
    snap.write_dir(dir.path()).unwrap();
    let back = MarketSnapshot::from_dir(dir.path()).unwrap();
    assert_eq!(back, snap);
    for k in 1..=2 * M {
        assert_eq!(back.discount(k as f64 / 2.0).unwrap(), truth().discount(k).unwrap());
    }
    let ilb = back.ilb_ratios(M).unwrap();
    for (k, r) in ilb.iter().enumerate() {
        assert!((r / truth().ilb_ratio(k + 1).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn synthetic_round_trip() {
    let cfg = price_config();
    let snap = snapshot(&cfg);
    let (nominal, rep) = calibrate_nominal(&snap, &cfg).unwrap();
    assert!(rep.term_structure_error < 1e-10, "{}", rep.term_structure_error);
    assert_eq!(rep.stages.len(), M);
    for s in &rep.stages {
        assert!(s.objective < 1e-10, "nominal stage {}: {}", s.stage, s.objective);
        assert_eq!(s.residuals.len(), snap.caplets_for_year(s.stage).len());
        assert!(s.improvements.windows(2).all(|w| w[1].1 < w[0].1 && w[1].0 > w[0].0));
        assert!(s.evaluations <= cfg.budget);
    }
    assert_eq!(rep.lower_bounds.len(), 2 * M - 1);

    let (model, rep) = calibrate_inflation(&snap, &nominal, &cfg).unwrap();
    assert!(rep.term_structure_error < 1e-10, "{}", rep.term_structure_error);
    for s in &rep.stages {
        assert!(s.objective < 1e-10, "inflation stage {}: {}", s.stage, s.objective);
        assert_eq!(s.market, Market::Inflation);
    }
    for q in &snap.inflation_options {
        let (kj, k) = (2 * q.maturity_years - 2, 2 * q.maturity_years);
        let cap = model.inflation_caplet_price(kj, k, q.strike, None).unwrap();
        let floor = model.inflation_floorlet_price(kj, k, q.strike, None).unwrap();
        let parity = model.inflation_parity_term(kj, k, q.strike).unwrap();
        assert!((cap - floor - parity).abs() < 1e-10);
    }
    // The inflation stage leaves nominal prices untouched.
    for k in 2..=2 * M {
        assert_eq!(model.discount(k).unwrap(), nominal.discount(k).unwrap());
    }
    let dir = tempfile::tempdir().unwrap();
    rep.write(dir.path()).unwrap();
    let text = std::fs::read_to_string(dir.path().join("residuals_inflation.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + snap.inflation_options.len());
    assert!(dir.path().join("report.json").exists());
}

#[test]
fn stages_are_independent() {
    let m = truth();
    let opts = FourierOptions::default();
    let ratios = m.bond_ratios().unwrap();
    // Replace X¹ and refit its exponents: year-2 caplets are unaffected.
    let c = Component::CirJump {
        lambda: 0.5,
        theta: 0.03,
        eta: 0.2,
        alpha: 30.0,
        beta: 0.1,
        x0: 0.01,
    };
    let spec = m.spec().with_component(1, c).unwrap();
    let mut layout = m.layout().clone();
    fit_ubar_range(&spec, M, &layout.tilde_u, &ratios, &mut layout.bar_u, 1, 2).unwrap();
    let changed = InflationModel::new(spec, layout, m.p0t()).unwrap();
    for s in CAPLET_STRIKES {
        let a = m.nominal_option_price_with(OptionKind::Call, 4, s, &opts).unwrap();
        let b = changed
            .nominal_option_price_with(OptionKind::Call, 4, s, &opts)
            .unwrap();
        assert_eq!(a, b);
    }
    assert_ne!(
        m.nominal_caplet_price(2, 0.03, None).unwrap(),
        changed.nominal_caplet_price(2, 0.03, None).unwrap()
    );
    // Replace X^{M+2} and refit v̄_3, v̄_4: year-1 inflation options are unaffected.
    let c = Component::DoubleGammaOuBm {
        lambda: 0.9,
        theta: 0.0,
        sigma: 0.05,
        alpha_plus: 60.0,
        alpha_minus: 60.0,
        beta_plus: 0.2,
        beta_minus: 0.2,
        x0: 0.01,
    };
    let cand = InflationModel::new(m.spec().with_component(M + 2, c).unwrap(), m.layout().clone(), m.p0t()).unwrap();
    let mut layout = cand.layout().clone();
    for k in [3, 4] {
        layout.bar_v[k - 1] = cand
            .fit_vbar(k, m.ilb_ratio(k).unwrap(), RootPolicy::Positive)
            .unwrap()
            .value;
    }
    let changed = cand.with_layout(layout).unwrap();
    for s in INFLATION_STRIKES {
        let a = m.inflation_caplet_price(0, 2, s, None).unwrap();
        let b = changed.inflation_caplet_price(0, 2, s, None).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn budget_exhaustion_is_reported() {
    let cfg = CalibrationConfig {
        budget: 5,
        ..price_config()
    };
    let (_, rep) = calibrate_nominal(&snapshot(&cfg), &cfg).unwrap();
    for s in &rep.stages {
        assert_eq!(s.stop, Some(StopReason::BudgetExhausted));
        assert!(s.evaluations <= 5);
    }
}

#[test]
fn flat_curve_single_factor_setup() {
    // Flat 3.5% semiannual curve and flat 20% caplet volatilities.
    let snap = MarketSnapshot {
        curve: (1..=6)
            .map(|k| CurvePoint {
                maturity_years: k as f64 / 2.0,
                discount: 1.0175f64.powi(-k),
            })
            .collect(),
        caplet_vols: (1..=3)
            .flat_map(|y| {
                [0.03, 0.035, 0.04].map(|s| CapletVol {
                    expiry_years: y as f64 - 0.5,
                    strike: s,
                    vol: 0.2,
                })
            })
            .collect(),
        ..Default::default()
    };
    let cfg = CalibrationConfig {
        budget: 150,
        ..CalibrationConfig::default()
    };
    let (model, rep) = calibrate_nominal(&snap, &cfg).unwrap();
    assert!(rep.term_structure_error < 1e-10);
    for k in 2..=model.n() {
        assert!(model.u(k).iter().zip(model.u(k - 1)).all(|(a, b)| a <= b));
    }
    assert_eq!(rep.lower_bounds.len(), model.n() - 1);
    for a in &rep.lower_bounds {
        assert!(a.bound >= 0.0 && a.bound <= model.forward_rate(a.k).unwrap());
        assert_eq!(a.flagged, a.bound >= cfg.lower_bound_threshold);
    }
    for s in &rep.stages {
        assert!(s.objective.is_finite());
        assert!(s.residuals.iter().all(|r| r.model_vol.is_some()));
    }
}
