//! Oracle suite: closed forms, ODE integration, Monte Carlo, parity identities and shape
//! properties, each reported as a pass/fail [`Check`].

use std::time::Instant;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::affine::{Component, ProcessSpec};
use crate::black::OptionKind;
use crate::calibration::{calibrate_inflation, calibrate_nominal, CalibrationConfig, Objective};
use crate::cosh::{
    brownian_closed_form_floorlet, brownian_closed_form_put_swaption, locate_max, symmetric_reach, CoshLiborModel,
    PricingOptions, TenorGrid,
};
use crate::error::{RatesError, Result};
use crate::inflation::{default_tilde_v, FourierOptions, InflationModel, RootPolicy};
use crate::market::synthetic_snapshot;
use crate::mc::{
    caplet_mc, cpi_option_mc, floorlet_mc, forward_inflation_mc, inflation_option_mc, nominal_option_mc,
    put_swaption_mc, McEstimate, SimConfig,
};
use crate::surface::cosh_caplet_surface;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub criterion: u8,
    pub name: String,
    pub passed: bool,
    /// Worst error (or violation count) over all cases, compared with `threshold`.
    pub worst: f64,
    pub threshold: f64,
    pub cases: usize,
    pub seconds: f64,
    pub limit_seconds: f64,
    pub detail: String,
}

impl Check {
    /// `criterion name PASS|FAIL worst=… threshold=… cases=… time=…s/…s detail`.
    pub fn line(&self) -> String {
        format!(
            "criterion {} {} {} worst={:.3e} threshold={:.1e} cases={} time={:.1}s/{} {}",
            self.criterion,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.worst,
            self.threshold,
            self.cases,
            self.seconds,
            if self.limit_seconds.is_finite() {
                format!("{}s", self.limit_seconds)
            } else {
                "-".into()
            },
            self.detail
        )
    }
}

struct Outcome {
    worst: f64,
    cases: usize,
    detail: String,
}

fn outcome(worst: f64, cases: usize) -> Outcome {
    Outcome {
        worst,
        cases,
        detail: String::new(),
    }
}

fn run(criterion: u8, name: &str, threshold: f64, f: impl FnOnce() -> Result<Outcome>) -> Check {
    let limit = criterion_limit(criterion);
    let start = Instant::now();
    let r = f();
    let seconds = start.elapsed().as_secs_f64();
    let (worst, cases, detail, ok) = match r {
        Ok(o) => (o.worst, o.cases, o.detail, o.worst < threshold),
        Err(e) => (f64::INFINITY, 0, format!("error: {e}"), false),
    };
    Check {
        criterion,
        name: name.to_string(),
        passed: ok && seconds < limit,
        worst,
        threshold,
        cases,
        seconds,
        limit_seconds: limit,
        detail,
    }
}

fn rel(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / b.abs().max(floor)
}

/// `1.0175^{-k}`: flat 3.5% with semiannual compounding.
pub fn flat_curve(n: usize) -> Vec<f64> {
    (1..=n).map(|k| 1.0175f64.powi(-(k as i32))).collect()
}

pub fn skew_component() -> Component<f64> {
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

pub fn smile_component() -> Component<f64> {
    Component::DoubleGammaOuBm {
        lambda: 0.02,
        theta: 0.0,
        sigma: 0.0,
        alpha_plus: 50.0,
        alpha_minus: 5.0,
        beta_plus: 50.0,
        beta_minus: 10.0,
        x0: 1.0,
    }
}

/// One-factor cosh model on 20 semiannual periods fitted to the flat 3.5% curve.
pub fn flat_cosh_model(c: Component<f64>) -> Result<CoshLiborModel<f64>> {
    CoshLiborModel::fit(
        ProcessSpec::single(c, 10.0)?,
        TenorGrid::semiannual(20)?,
        &flat_curve(20),
    )
}

fn kernel_variants() -> Vec<Component<f64>> {
    vec![
        Component::Cir {
            lambda: 0.026,
            theta: 0.65,
            eta: 0.5,
            x0: 3.45,
        },
        Component::CirJump {
            lambda: 0.3,
            theta: 0.4,
            eta: 0.2,
            alpha: 4.0,
            beta: 1.5,
            x0: 0.8,
        },
        Component::GaussOu {
            lambda: 0.02,
            theta: 0.0,
            sigma: 0.3,
            x0: 0.7,
        },
        skew_component(),
    ]
}

/// A real exponent strictly inside the time-uniform domain, clipped to `[-3, 3]`.
fn admissible(spec: &ProcessSpec<f64>, frac: f64) -> f64 {
    let (lo, hi) = spec.uniform_domain().intervals[0];
    let (lo, hi) = (lo.max(-3.0), hi.min(3.0));
    lo + (hi - lo) * (0.02 + 0.96 * frac)
}

/// Criterion 1: Fourier floorlets and put swaptions against the Brownian closed forms.
pub fn brownian_closed_forms() -> Check {
    run(1, "brownian-closed-forms", 1e-8, || {
        let m = flat_cosh_model(Component::BrownianDrift {
            sigma: 1.0,
            mu: 0.0,
            x0: 0.0,
        })?;
        let (mut worst, mut cases) = (0.0f64, 0);
        for k in [1usize, 3, 6, 10, 15] {
            for strike in [0.005, 0.02, 0.03, 0.04, 0.05, 0.07] {
                let cf = brownian_closed_form_floorlet(&m, k, strike)?;
                worst = worst.max(rel(m.floorlet_price(k, strike, None)?, cf, 1e-300));
                let cf = brownian_closed_form_put_swaption(&m, k, k + 4, strike)?;
                worst = worst.max(rel(m.put_swaption_price(k, k + 4, strike, None)?, cf, 1e-300));
                cases += 2;
            }
        }
        Ok(outcome(worst, cases))
    })
}

/// Criterion 2: closed-form `φ, ψ` against adaptive integration of the Riccati equations.
pub fn riccati_oracle(seed: u64) -> Check {
    run(2, "riccati-ode", 1e-6, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut worst, mut cases) = (0.0f64, 0);
        for c in kernel_variants() {
            let spec = ProcessSpec::single(c, 10.0)?;
            for _ in 0..20 {
                let t = rng.gen_range(0.1..10.0);
                let u = admissible(&spec, rng.gen_range(0.05..0.95));
                let (phi, psi) = spec.phi_psi_1d(t, Complex::new(u, 0.0))?;
                let (p, q) = spec.riccati_integrate(t, &[u])?;
                worst = worst.max(rel(phi.re, p, 1e-8)).max(rel(psi.re, q[0], 1e-8));
                cases += 1;
            }
        }
        Ok(outcome(worst, cases))
    })
}

/// Criterion 3: `φ_{t+s}(u) = φ_t(u) + φ_s(ψ_t(u))` and `ψ_{t+s}(u) = ψ_s(ψ_t(u))`.
pub fn semiflow(seed: u64, per_variant: usize) -> Check {
    run(3, "semiflow", 1e-10, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut variants = kernel_variants();
        variants.push(Component::BrownianDrift {
            sigma: 0.8,
            mu: 0.1,
            x0: 0.2,
        });
        let (mut worst, mut cases) = (0.0f64, 0);
        for c in variants {
            let spec = ProcessSpec::single(c, 10.0)?;
            for _ in 0..per_variant {
                let (s, t) = (rng.gen_range(0.0..5.0), rng.gen_range(0.0..5.0));
                let u = Complex::new(admissible(&spec, rng.gen()), rng.gen_range(-2.0..2.0));
                let (pt, qt) = spec.phi_psi_1d(t, u)?;
                let (ps, qs) = spec.phi_psi_1d(s, qt)?;
                let (pts, qts) = spec.phi_psi_1d(t + s, u)?;
                worst = worst.max((pts - pt - ps).norm()).max((qts - qs).norm());
                cases += 1;
            }
        }
        Ok(outcome(worst, cases))
    })
}

fn cosh_mc_models() -> Result<Vec<(&'static str, CoshLiborModel<f64>)>> {
    Ok(vec![
        ("skew", flat_cosh_model(skew_component())?),
        ("smile", flat_cosh_model(smile_component())?),
        (
            "gauss",
            flat_cosh_model(Component::GaussOu {
                lambda: 0.1,
                theta: 0.0,
                sigma: 0.25,
                x0: 0.3,
            })?,
        ),
    ])
}

fn common_factor() -> Component<f64> {
    Component::Cir {
        lambda: 0.026,
        theta: 0.65,
        eta: 0.5,
        x0: 3.45,
    }
}

/// Nominal discount factors `exp(-(a + b k) k / 2)` on the semiannual grid.
fn discounts(m: usize, a: f64, b: f64) -> Vec<f64> {
    (1..=2 * m)
        .map(|k| (-(a + b * k as f64) * k as f64 / 2.0).exp())
        .collect()
}

/// Fits an inflation model to the given nominal curve and a flat zero-coupon inflation rate.
fn inflation_model(comps: Vec<Component<f64>>, m: usize, d: &[f64], infl: f64) -> Result<InflationModel<f64>> {
    let spec = ProcessSpec::from_components(comps, m as f64)?;
    let nom = InflationModel::fit_nominal(spec, m, None, d)?;
    let p0t = nom.p0t();
    let ilb: Vec<f64> = d
        .iter()
        .enumerate()
        .map(|(i, p)| p / p0t * (1.0 + infl).powf((i + 1) as f64 / 2.0))
        .collect();
    let tv = default_tilde_v(&nom.layout().tilde_u, 0.08);
    Ok(nom.fit_vbar_sequence(&tv, &ilb, RootPolicy::Positive)?.0)
}

fn inflation_mc_models() -> Result<Vec<(&'static str, InflationModel<f64>)>> {
    let m = 3;
    let mut a = vec![common_factor()];
    for i in 1..=m {
        let s = i as f64;
        a.push(Component::CirJump {
            lambda: 0.3 + 0.05 * s,
            theta: 0.02,
            eta: 0.08,
            alpha: 20.0,
            beta: 0.4,
            x0: 0.02 + 0.002 * s,
        });
    }
    for i in 1..=m {
        a.push(Component::DoubleGammaOuBm {
            lambda: 0.5 + 0.1 * i as f64,
            theta: 0.0,
            sigma: 0.06,
            alpha_plus: 25.0,
            alpha_minus: 20.0,
            beta_plus: 1.0,
            beta_minus: 0.8,
            x0: 0.01,
        });
    }
    let mut b = vec![common_factor()];
    b.extend((1..=2).map(|i| Component::Cir {
        lambda: 0.2 * i as f64,
        theta: 0.03,
        eta: 0.1,
        x0: 0.02,
    }));
    b.extend((1..=2).map(|i| Component::GaussOu {
        lambda: 0.3 * i as f64,
        theta: 0.0,
        sigma: 0.05,
        x0: 0.0,
    }));
    let mut c = vec![common_factor()];
    c.extend((1..=2).map(|i| Component::CirJump {
        lambda: 0.5,
        theta: 0.015,
        eta: 0.12,
        alpha: 12.0 + i as f64,
        beta: 0.6,
        x0: 0.015,
    }));
    c.extend((1..=2).map(|_| Component::DoubleGammaOuBm {
        lambda: 0.8,
        theta: 0.01,
        sigma: 0.02,
        alpha_plus: 40.0,
        alpha_minus: 30.0,
        beta_plus: 2.0,
        beta_minus: 3.0,
        x0: -0.01,
    }));
    Ok(vec![
        (
            "cir-jump/dgamoubm",
            inflation_model(a, m, &discounts(m, 0.02, 0.002), 0.02)?,
        ),
        ("cir/gauss", inflation_model(b, 2, &discounts(2, 0.025, 0.001), 0.015)?),
        (
            "cir-jump/dgamoubm-2",
            inflation_model(c, 2, &discounts(2, 0.01, 0.004), 0.025)?,
        ),
    ])
}

/// Monte Carlo estimates paired with the exact prices they should match.
type Pairing<'a, M> = &'a dyn Fn(&M) -> Result<(Vec<McEstimate>, Vec<f64>)>;

fn z_worst(est: &[McEstimate], exact: &[f64]) -> f64 {
    est.iter().zip(exact).map(|(e, &v)| e.z_score(v)).fold(0.0, f64::max)
}

fn mc_family(name: &str, f: impl FnOnce() -> Result<Vec<(String, Vec<McEstimate>, Vec<f64>)>>) -> Check {
    run(4, name, 3.0, || {
        let (mut worst, mut cases, mut detail) = (0.0f64, 0, Vec::new());
        for (label, est, exact) in f()? {
            let z = z_worst(&est, &exact);
            detail.push(format!("{label}:z={z:.2}"));
            worst = worst.max(z);
            cases += est.len();
        }
        Ok(Outcome {
            worst,
            cases,
            detail: detail.join(" "),
        })
    })
}

/// Criterion 4: every pricing operation within 3 standard errors of Monte Carlo on three
/// model configurations. Returns one check per operation.
pub fn mc_concordance(paths: usize, seed: u64) -> Vec<Check> {
    let cfg = SimConfig::with_paths(paths, seed);
    let cosh = cosh_mc_models();
    let infl = inflation_mc_models();
    let cosh = |f: Pairing<CoshLiborModel<f64>>| -> Result<Vec<_>> {
        let models = cosh.as_ref().map_err(Clone::clone)?;
        models
            .iter()
            .map(|(n, m)| f(m).map(|(e, x)| (n.to_string(), e, x)))
            .collect()
    };
    let infl = |f: Pairing<InflationModel<f64>>| -> Result<Vec<_>> {
        let models = infl.as_ref().map_err(Clone::clone)?;
        models
            .iter()
            .map(|(n, m)| f(m).map(|(e, x)| (n.to_string(), e, x)))
            .collect()
    };
    let rates = [0.03, 0.04];
    vec![
        mc_family("mc-floorlet", || {
            cosh(&|m| {
                let exact = rates
                    .iter()
                    .map(|&s| m.floorlet_price(4, s, None))
                    .collect::<Result<_>>()?;
                Ok((floorlet_mc(m, 4, &rates, &cfg)?, exact))
            })
        }),
        mc_family("mc-caplet", || {
            let mut out = cosh(&|m| {
                let exact = rates
                    .iter()
                    .map(|&s| m.caplet_price(4, s, None))
                    .collect::<Result<_>>()?;
                Ok((caplet_mc(m, 4, &rates, &cfg)?, exact))
            })?;
            let nominal = [0.02, 0.03];
            out.extend(infl(&|m| {
                let exact = nominal
                    .iter()
                    .map(|&s| m.nominal_caplet_price(4, s, None))
                    .collect::<Result<_>>()?;
                Ok((nominal_option_mc(m, OptionKind::Call, 4, &nominal, &cfg)?, exact))
            })?);
            Ok(out)
        }),
        mc_family("mc-put-swaption", || {
            cosh(&|m| {
                Ok((
                    vec![put_swaption_mc(m, 4, 10, 0.035, &cfg)?],
                    vec![m.put_swaption_price(4, 10, 0.035, None)?],
                ))
            })
        }),
        mc_family("mc-cpi-call", || {
            let strikes = [1.0, 1.05];
            infl(&|m| {
                let exact = strikes
                    .iter()
                    .map(|&s| m.cpi_call_price(4, s, None))
                    .collect::<Result<_>>()?;
                Ok((cpi_option_mc(m, OptionKind::Call, 4, &strikes, &cfg)?, exact))
            })
        }),
        mc_family("mc-inflation-caplet", || {
            let strikes = [0.01, 0.03];
            infl(&|m| {
                let exact = strikes
                    .iter()
                    .map(|&s| m.inflation_caplet_price(2, 4, s, None))
                    .collect::<Result<_>>()?;
                Ok((inflation_option_mc(m, OptionKind::Call, 2, 4, &strikes, &cfg)?, exact))
            })
        }),
        mc_family("mc-forward-inflation", || {
            infl(&|m| {
                Ok((
                    vec![forward_inflation_mc(m, 2, 4, &cfg)?],
                    vec![m.forward_inflation_rate0(2, 4)?],
                ))
            })
        }),
    ]
}

/// Criterion 5: fitted models reproduce discount ratios and forward CPIs.
pub fn term_structures(seed: u64) -> Check {
    run(5, "term-structure-fits", 1e-10, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut worst, mut cases) = (0.0f64, 0);
        for c in [
            skew_component(),
            Component::GaussOu {
                lambda: 0.1,
                theta: 0.0,
                sigma: 0.25,
                x0: 0.3,
            },
        ] {
            for _ in 0..5 {
                let d = discounts(10, rng.gen_range(0.01..0.04), rng.gen_range(0.0..0.001));
                let m = CoshLiborModel::fit(ProcessSpec::single(c, 10.0)?, TenorGrid::semiannual(20)?, &d)?;
                for (k, p) in d.iter().enumerate() {
                    worst = worst.max(rel(m.discount(k + 1)?, *p, 0.0));
                }
                cases += 1;
            }
        }
        for _ in 0..5 {
            let (m, d, infl) = random_inflation_model(&mut rng)?;
            let p0t = d[d.len() - 1];
            for (i, p) in d.iter().enumerate() {
                let k = i + 1;
                worst = worst.max(rel(m.discount(k)?, *p, 0.0));
                let ilb = p / p0t * (1.0 + infl).powf(k as f64 / 2.0);
                worst = worst.max(rel(m.ilb_ratio(k)?, ilb, 0.0));
                worst = worst.max(rel(m.forward_cpi0(k)?, (1.0 + infl).powf(k as f64 / 2.0), 0.0));
            }
            cases += 1;
        }
        Ok(outcome(worst, cases))
    })
}

/// Two-year model with randomised factors and curves; redraws until the fits succeed.
fn random_inflation_model(rng: &mut ChaCha8Rng) -> Result<(InflationModel<f64>, Vec<f64>, f64)> {
    let m = 2;
    for _ in 0..50 {
        let mut comps = vec![common_factor()];
        for _ in 0..m {
            comps.push(Component::CirJump {
                lambda: rng.gen_range(0.1..1.0),
                theta: rng.gen_range(0.01..0.04),
                eta: rng.gen_range(0.02..0.15),
                alpha: rng.gen_range(10.0..40.0),
                beta: rng.gen_range(0.1..1.0),
                x0: rng.gen_range(0.01..0.04),
            });
        }
        for _ in 0..m {
            comps.push(Component::DoubleGammaOuBm {
                lambda: rng.gen_range(0.2..1.5),
                theta: rng.gen_range(-0.01..0.01),
                sigma: rng.gen_range(0.0..0.08),
                alpha_plus: rng.gen_range(20.0..60.0),
                alpha_minus: rng.gen_range(20.0..60.0),
                beta_plus: rng.gen_range(0.1..3.0),
                beta_minus: rng.gen_range(0.1..3.0),
                x0: rng.gen_range(-0.02..0.02),
            });
        }
        let d = discounts(m, rng.gen_range(0.005..0.04), rng.gen_range(0.0..0.003));
        let infl = rng.gen_range(0.0..0.04);
        if let Ok(model) = inflation_model(comps, m, &d, infl) {
            return Ok((model, d, infl));
        }
    }
    Err(RatesError::Infeasible(
        "no feasible random inflation model in 50 draws".into(),
    ))
}

/// Criterion 8: put/call parity, cap/floor parity and zero value of swaps at par.
pub fn parity_identities(seed: u64) -> Check {
    run(8, "parity-and-par", 1e-10, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut worst, mut cases) = (0.0f64, 0);
        let opts = FourierOptions::default();
        for _ in 0..5 {
            let (m, _, _) = random_inflation_model(&mut rng)?;
            for k in [2, 4] {
                let strike = rng.gen_range(0.9..1.15);
                let call = m.cpi_option_price_with(OptionKind::Call, k, strike, &opts)?;
                let put = m.cpi_option_price_with(OptionKind::Put, k, strike, &opts)?;
                worst = worst.max((call - put - m.discount(k)? * (m.forward_cpi0(k)? - strike)).abs());
                let rate = rng.gen_range(0.0..0.06);
                let call = m.nominal_option_price_with(OptionKind::Call, k, rate, &opts)?;
                let put = m.nominal_option_price_with(OptionKind::Put, k, rate, &opts)?;
                let annuity = m.grid().accrual(k) * m.discount(k)?;
                worst = worst.max((call - put - annuity * (m.forward_rate(k)? - rate)).abs());
                let kj = k - 2;
                let strike = rng.gen_range(-0.02..0.06);
                let cap = m.inflation_option_price_with(OptionKind::Call, kj, k, strike, &opts)?;
                let floor = m.inflation_option_price_with(OptionKind::Put, kj, k, strike, &opts)?;
                worst = worst.max((cap - floor - m.inflation_parity_term(kj, k, strike)?).abs());
                cases += 3;
            }
            for y in 1..=m.years() {
                worst = worst.max(m.zciis_value(y, m.zciis_rate(y)?)?.abs());
                worst = worst.max(m.yyiis_value(y, m.yyiis_rate(y)?)?.abs());
                cases += 2;
            }
        }
        Ok(outcome(worst, cases))
    })
}

fn random_cosh_model(rng: &mut ChaCha8Rng) -> Result<CoshLiborModel<f64>> {
    let c = match rng.gen_range(0..4) {
        0 => Component::BrownianDrift {
            sigma: rng.gen_range(0.2..2.0),
            mu: rng.gen_range(-0.2..0.2),
            x0: rng.gen_range(-1.0..1.0),
        },
        1 => Component::GaussOu {
            lambda: rng.gen_range(0.01..1.0),
            theta: rng.gen_range(-0.5..0.5),
            sigma: rng.gen_range(0.05..0.6),
            x0: rng.gen_range(-1.0..1.0),
        },
        2 => Component::DoubleGammaOuBm {
            lambda: rng.gen_range(0.01..1.0),
            theta: rng.gen_range(-0.5..0.5),
            sigma: rng.gen_range(0.0..0.5),
            alpha_plus: rng.gen_range(5.0..50.0),
            alpha_minus: rng.gen_range(5.0..50.0),
            beta_plus: rng.gen_range(0.5..50.0),
            beta_minus: rng.gen_range(0.5..50.0),
            x0: rng.gen_range(-1.0..1.0),
        },
        _ => Component::Cir {
            lambda: rng.gen_range(0.01..1.0),
            theta: rng.gen_range(0.1..1.0),
            eta: rng.gen_range(0.05..0.5),
            x0: rng.gen_range(0.1..2.0),
        },
    };
    let spec = ProcessSpec::single(c, 10.0)?;
    // Larger exponents push the leg ratios of the triggers below double precision.
    let reach: f64 = symmetric_reach(&spec);
    let reach = reach.min(1.0);
    let mut u: Vec<f64> = (0..20).map(|_| rng.gen_range(0.0..0.95 * reach)).collect();
    u.sort_by(|a, b| b.total_cmp(a));
    u[19] = 0.0;
    CoshLiborModel::new(spec, TenorGrid::semiannual(20)?, u, rng.gen_range(0.6..0.95))
}

/// Number of strict local maxima of `g` on `n` equally spaced points of `[a, b]`.
fn local_maxima(g: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> usize {
    let v: Vec<f64> = (0..n).map(|i| g(a + (b - a) * i as f64 / (n - 1) as f64)).collect();
    let signs: Vec<bool> = v.windows(2).filter(|w| w[1] != w[0]).map(|w| w[1] > w[0]).collect();
    signs.windows(2).filter(|s| s[0] && !s[1]).count()
}

/// Criterion 9: trigger functions of randomly generated floorlets and put swaptions have
/// exactly one local maximum on a fine scan around their maximiser.
pub fn unimodality(seed: u64, count: usize) -> Check {
    run(9, "unimodal-triggers", 1.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bad = Vec::new();
        for i in 0..count {
            let m = random_cosh_model(&mut rng)?;
            let strike = rng.gen_range(0.0..0.1);
            let (g, gap): (Box<dyn Fn(f64) -> f64>, f64) = if i % 2 == 0 {
                let k = rng.gen_range(1..19);
                if m.u(k) <= m.u(k + 1) {
                    continue;
                }
                (Box::new(m.floorlet_trigger(k, strike)?), m.u(k) - m.u(k + 1))
            } else {
                let alpha = rng.gen_range(1..19);
                let beta = rng.gen_range(alpha + 1..=20);
                if m.u(alpha) <= m.u(beta) {
                    continue;
                }
                (
                    Box::new(m.swaption_trigger(alpha, beta, strike)?),
                    m.u(alpha) - m.u(beta),
                )
            };
            let (x, _) = locate_max(&g, m.x0())?;
            let w = (8.0 / gap).clamp(1.0, 1e4);
            let n = local_maxima(&g, x - w, x + w, 10_000);
            if n != 1 {
                bad.push(format!("case {i}: {n} maxima"));
            }
        }
        Ok(Outcome {
            worst: bad.len() as f64,
            cases: count,
            detail: bad.join("; "),
        })
    })
}

/// Criterion 6: skew and smile shapes and the forward-rate lower bounds of the skew setup.
pub fn surface_shapes() -> Vec<Check> {
    let strikes: Vec<f64> = (0..=10).map(|i| 0.02 + 0.005 * i as f64).collect();
    let fixings: Vec<usize> = (1..=10).collect();
    let vols = |c: Component<f64>| -> Result<Vec<Vec<Option<f64>>>> {
        let m = flat_cosh_model(c)?;
        let s = cosh_caplet_surface(&m, &fixings, &strikes, None, &PricingOptions::default())?;
        Ok(s.chunks(strikes.len())
            .map(|r| r.iter().map(|p| p.implied_vol).collect())
            .collect())
    };
    let skew = run(6, "skew-decreasing", 1.0, || {
        let mut bad = Vec::new();
        for (i, row) in vols(skew_component())?.iter().enumerate() {
            let ok = row.windows(2).all(|w| matches!(w, [Some(a), Some(b)] if b < a));
            if !ok {
                bad.push(format!("expiry {}", 0.5 * (i + 1) as f64));
            }
        }
        Ok(Outcome {
            worst: bad.len() as f64,
            cases: fixings.len(),
            detail: bad.join(" "),
        })
    });
    let smile = run(6, "smile-interior-minimum", 1.0, || {
        let mut bad = Vec::new();
        for (i, row) in vols(smile_component())?.iter().enumerate() {
            let v: Option<Vec<f64>> = row.iter().copied().collect();
            let ok = v.is_some_and(|v| {
                let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
                lo < v[0] && lo < v[v.len() - 1]
            });
            if !ok {
                bad.push(format!("expiry {}", 0.5 * (i + 1) as f64));
            }
        }
        Ok(Outcome {
            worst: bad.len() as f64,
            cases: fixings.len(),
            detail: bad.join(" "),
        })
    });
    let bounds = run(6, "skew-lower-bounds", 1.0, || {
        let m = flat_cosh_model(skew_component())?;
        let lb = (2..=m.grid().len())
            .map(|k| m.forward_rate_lower_bound(k, m.grid().date(k - 1)))
            .collect::<Result<Vec<_>>>()?;
        let mut bad = Vec::new();
        if !(lb[0] > 0.0 && lb[0] < 0.02) {
            bad.push(format!("first bound {:.4}", lb[0]));
        }
        if !lb.windows(2).all(|w| w[1] < w[0]) {
            bad.push("not decreasing".to_string());
        }
        let detail = format!("first={:.4} last={:.4} {}", lb[0], lb[lb.len() - 1], bad.join(" "));
        Ok(Outcome {
            worst: bad.len() as f64,
            cases: lb.len(),
            detail,
        })
    });
    vec![skew, smile, bounds]
}

/// Five-year semiannual model used for the calibration round trip.
pub fn round_trip_truth() -> Result<InflationModel<f64>> {
    let m = 5;
    let mut comps = vec![common_factor()];
    for i in 1..=m {
        let s = i as f64;
        comps.push(Component::CirJump {
            lambda: 0.2 + 0.04 * s,
            theta: 0.015 + 0.002 * s,
            eta: 0.1,
            alpha: 15.0 + s,
            beta: 0.2 + 0.05 * s,
            x0: 0.015 + 0.001 * s,
        });
    }
    for i in 1..=m {
        let s = i as f64;
        comps.push(Component::DoubleGammaOuBm {
            lambda: 0.4 + 0.05 * s,
            theta: 0.0,
            sigma: 0.03,
            alpha_plus: 50.0,
            alpha_minus: 45.0,
            beta_plus: 0.6,
            beta_minus: 0.4 + 0.02 * s,
            x0: 0.005,
        });
    }
    inflation_model(comps, m, &discounts(m, 0.015, 0.002), 0.02)
}

/// Criterion 7: quotes from a known five-year model are recalibrated with default budgets.
/// Quotes are generated with the default pricing quadrature, calibration uses its own.
pub fn calibration_round_trip() -> Check {
    run(7, "calibration-round-trip", 1e-10, || {
        let truth = round_trip_truth()?;
        let snap = synthetic_snapshot(
            &truth,
            &[0.01, 0.02, 0.03, 0.04, 0.05, 0.06],
            &[-0.02, 0.0, 0.02, 0.04, 0.06],
            &FourierOptions::default(),
        )?;
        let cfg = CalibrationConfig {
            nominal_objective: Objective::MsePrice,
            ..CalibrationConfig::default()
        };
        let (nominal, a) = calibrate_nominal(&snap, &cfg)?;
        let (_, b) = calibrate_inflation(&snap, &nominal, &cfg)?;
        let stages: Vec<_> = a.stages.iter().chain(&b.stages).collect();
        let worst = stages.iter().map(|s| s.objective).fold(0.0, f64::max);
        let tse = a.term_structure_error.max(b.term_structure_error);
        let detail = format!(
            "objectives={} term_structure_error={tse:.1e}",
            stages
                .iter()
                .map(|s| format!("{:.1e}", s.objective))
                .collect::<Vec<_>>()
                .join(",")
        );
        Ok(Outcome {
            worst: worst.max(tse),
            cases: stages.len(),
            detail,
        })
    })
}

/// Oracle checks (criteria 1–5, 8, 9); surface shapes and the calibration round trip are
/// separate. `mc_paths` scales the Monte Carlo part.
pub fn oracle_suite(mc_paths: usize, seed: u64) -> Vec<Check> {
    let mut out = vec![brownian_closed_forms(), riccati_oracle(seed), semiflow(seed, 1000)];
    out.extend(mc_concordance(mc_paths, seed));
    out.push(term_structures(seed));
    out.push(parity_identities(seed));
    out.push(unimodality(seed, 500));
    out
}

/// Total runtime allowed for each criterion, in seconds.
pub fn criterion_limit(criterion: u8) -> f64 {
    match criterion {
        1 | 3 => 5.0,
        2 => 10.0,
        4 => 600.0,
        7 => 900.0,
        8 => 60.0,
        6 | 9 => 120.0,
        _ => f64::INFINITY,
    }
}

/// Criterion verdict: every check passed and their summed runtime is within the limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub criterion: u8,
    pub passed: bool,
    pub seconds: f64,
    pub failed_checks: Vec<String>,
}

pub fn verdicts(checks: &[Check]) -> Vec<Verdict> {
    let mut ids: Vec<u8> = checks.iter().map(|c| c.criterion).collect();
    ids.sort_unstable();
    ids.dedup();
    ids.into_iter()
        .map(|criterion| {
            let group: Vec<&Check> = checks.iter().filter(|c| c.criterion == criterion).collect();
            let seconds = group.iter().map(|c| c.seconds).sum();
            let failed_checks: Vec<String> = group.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
            let passed = failed_checks.is_empty() && seconds < criterion_limit(criterion);
            Verdict {
                criterion,
                passed,
                seconds,
                failed_checks,
            }
        })
        .collect()
}
