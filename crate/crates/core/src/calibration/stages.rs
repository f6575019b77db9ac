use rayon::prelude::*;

use super::params::Parameterisation;
use super::report::{CalibrationReport, LowerBoundAudit, Market, QuoteResidual, StageReport};
use super::simplex::nelder_mead;
use super::{CalibrationConfig, Objective};
use crate::affine::{Component, ProcessSpec};
use crate::black::{black_implied_vol, black_price, OptionKind};
use crate::error::{RatesError, Result};
use crate::inflation::{
    default_tilde_u, default_tilde_v, fit_ubar_range, fit_ubar_sequence, InflationModel, ParamLayout,
};
use crate::market::MarketSnapshot;

fn infeasible(stage: usize, e: RatesError) -> RatesError {
    RatesError::StageInfeasible {
        stage,
        reason: e.to_string(),
    }
}

fn mse(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        s / n as f64
    }
}

fn improvements(trace: &[f64]) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = Vec::new();
    for (i, &v) in trace.iter().enumerate() {
        if out.last().is_none_or(|&(_, b)| v < b) {
            out.push((i + 1, v));
        }
    }
    out
}

/// One quote reduced to what a stage objective needs.
#[derive(Debug, Clone, Copy)]
struct Quote {
    kind: OptionKind,
    strike: f64,
    price: f64,
    vol: Option<f64>,
}

struct Fitted {
    model: InflationModel<f64>,
    prices: Vec<f64>,
}

/// Stage objective from model prices. Volatilities use `forward` and `annuity` of the
/// candidate model; quotes without a volatility get one implied from their price.
struct Scorer {
    objective: Objective,
    expiry: f64,
    shift: f64,
    penalty: f64,
}

impl Scorer {
    fn vol(&self, kind: OptionKind, price: f64, forward: f64, strike: f64, annuity: f64) -> Option<f64> {
        black_implied_vol(kind, price, forward, strike, self.expiry, annuity, self.shift).ok()
    }

    fn score(&self, quotes: &[Quote], prices: &[f64], forward: f64, annuity: f64) -> f64 {
        match self.objective {
            Objective::MsePrice => mse(quotes.iter().zip(prices).map(|(q, p)| (p - q.price).powi(2))),
            Objective::MseImpliedVol => mse(quotes.iter().zip(prices).map(|(q, &p)| {
                let target = q.vol.or_else(|| self.vol(q.kind, q.price, forward, q.strike, annuity));
                match (target, self.vol(q.kind, p, forward, q.strike, annuity)) {
                    (Some(a), Some(b)) => (a - b).powi(2),
                    _ => self.penalty,
                }
            })),
        }
    }
}

fn years(snapshot: &MarketSnapshot, config: &CalibrationConfig) -> Result<usize> {
    let m = config
        .years
        .unwrap_or((snapshot.curve_horizon() + 1e-9).floor() as usize);
    if m == 0 {
        return Err(RatesError::InvalidParameter(
            "the curve must cover at least one year".into(),
        ));
    }
    Ok(m)
}

fn audit(model: &InflationModel<f64>, from: usize, threshold: f64) -> Result<Vec<LowerBoundAudit>> {
    (from.max(2)..=model.n())
        .map(|k| {
            let bound = model.forward_rate_lower_bound(k)?;
            Ok(LowerBoundAudit {
                k,
                bound,
                flagged: bound >= threshold,
            })
        })
        .collect()
}

fn max_rel_error(model: &InflationModel<f64>, discounts: &[f64], ilb: Option<&[f64]>) -> Result<f64> {
    let mut err: f64 = 0.0;
    for (i, d) in discounts.iter().enumerate() {
        err = err.max((model.discount(i + 1)? / d - 1.0).abs());
    }
    if let Some(r) = ilb {
        for (i, v) in r.iter().enumerate() {
            err = err.max((model.ilb_ratio(i + 1)? / v - 1.0).abs());
        }
    }
    Ok(err)
}

/// Calibrates `X¹..X^M` and `ū` backwards in maturity. Stage `y` fits `X^y` to caplet
/// volatilities on `F^{2y}` (fixing at `y - 1/2`), priced as out-of-the-money caplets or
/// floorlets, refitting `ū_{2y-1}, ū_{2y}` to the curve inside
/// every objective evaluation.
pub fn calibrate_nominal(
    snapshot: &MarketSnapshot,
    config: &CalibrationConfig,
) -> Result<(InflationModel<f64>, CalibrationReport)> {
    config.validate()?;
    snapshot.validate()?;
    let m = years(snapshot, config)?;
    let n = 2 * m;
    let discounts = snapshot.discounts(m)?;
    let p0t = discounts[n - 1];
    let ratios: Vec<f64> = discounts.iter().map(|d| d / p0t).collect();
    let mut comps = vec![config.common()?];
    comps.extend(std::iter::repeat_n(config.nominal_initial()?, m));
    let spec = ProcessSpec::from_components(comps, m as f64)?;
    let tilde_u = match &config.tilde_u {
        Some(t) if t.len() == n => t.clone(),
        Some(t) => {
            return Err(RatesError::InvalidParameter(format!(
                "tilde_u has {} entries, expected {n}",
                t.len()
            )))
        }
        None => default_tilde_u(&spec, &ratios).map_err(|e| infeasible(0, e))?,
    };
    let bar_u = fit_ubar_sequence(&spec, m, &tilde_u, &ratios).map_err(|e| infeasible(0, e))?;
    let layout = ParamLayout::nominal(m, tilde_u.clone(), bar_u).map_err(|e| infeasible(0, e))?;
    let mut model = InflationModel::new(spec, layout, p0t).map_err(|e| infeasible(0, e))?;

    let fopts = config.fourier();
    let mut report = CalibrationReport::default();
    for y in (1..=m).rev() {
        let k = 2 * y;
        let fix = model.date(k - 1);
        let accrual = model.grid().accrual(k);
        let forward = (discounts[k - 2] / discounts[k - 1] - 1.0) / accrual;
        let annuity = accrual * discounts[k - 1];
        let quotes: Vec<Quote> = snapshot
            .caplets_for_year(y)
            .iter()
            .map(|q| {
                let kind = if q.strike >= forward {
                    OptionKind::Call
                } else {
                    OptionKind::Put
                };
                Quote {
                    kind,
                    strike: q.strike,
                    price: black_price(kind, forward, q.strike, fix, q.vol, annuity, 0.0),
                    vol: Some(q.vol),
                }
            })
            .collect();
        let scorer = Scorer {
            objective: config.nominal_objective,
            expiry: fix,
            shift: 0.0,
            penalty: config.vol_penalty,
        };
        let base = model.clone();
        let build = |c: Component<f64>| -> Result<InflationModel<f64>> {
            let spec = base.spec().with_component(y, c)?;
            let mut layout = base.layout().clone();
            fit_ubar_range(&spec, m, &tilde_u, &ratios, &mut layout.bar_u, k - 1, k)?;
            if let Component::CirJump { alpha, .. } = c {
                let used = layout.bar_u[k - 2].max(layout.bar_u[k - 1]);
                if !(alpha > used + config.alpha_margin) {
                    return Err(RatesError::Domain(format!(
                        "alpha {alpha} too close to exponent {used}"
                    )));
                }
            }
            InflationModel::new(spec, layout, p0t)
        };
        let fit = |c: Component<f64>| -> Result<Fitted> {
            let model = build(c)?;
            let prices = quotes
                .par_iter()
                .map(|q| model.nominal_option_price_with(q.kind, k, q.strike, &fopts))
                .collect::<Result<Vec<_>>>()?;
            Ok(Fitted { model, prices })
        };
        let score = |f: &Fitted| -> Result<f64> {
            let fwd = f.model.forward_rate(k)?;
            Ok(scorer.score(&quotes, &f.prices, fwd, accrual * f.model.discount(k)?))
        };
        let start = match report.stages.last() {
            Some(prev) if config.warm_start && prev.stop.is_some() && fit(*base.spec().component(y + 1)).is_ok() => {
                *base.spec().component(y + 1)
            }
            _ => *base.spec().component(y),
        };
        let (chosen, stop, evaluations, trace) = if quotes.is_empty() {
            (start, None, 0, vec![])
        } else {
            let param = Parameterisation::new(&start, &config.nominal_bounds)?;
            let objective = |x: &[f64]| -> f64 {
                param
                    .decode(x)
                    .and_then(|c| fit(c).ok())
                    .and_then(|f| score(&f).ok())
                    .unwrap_or(f64::INFINITY)
            };
            let r = nelder_mead(objective, &param.encode(&start), &config.simplex());
            if !r.value.is_finite() {
                return Err(infeasible(
                    y,
                    RatesError::Infeasible("no admissible parameters found".into()),
                ));
            }
            (
                param.decode(&r.x).expect("best point is admissible"),
                Some(r.stop),
                r.evaluations,
                r.trace,
            )
        };
        let fitted = fit(chosen).map_err(|e| infeasible(y, e))?;
        let objective = score(&fitted)?;
        let fwd = fitted.model.forward_rate(k)?;
        let ann = accrual * fitted.model.discount(k)?;
        let residuals = quotes
            .iter()
            .zip(&fitted.prices)
            .map(|(q, &p)| QuoteResidual {
                stage: y,
                expiry_years: fix,
                strike: q.strike,
                kind: if q.kind == OptionKind::Call {
                    "caplet"
                } else {
                    "floorlet"
                }
                .into(),
                market_price: q.price,
                model_price: p,
                market_vol: q.vol,
                model_vol: black_implied_vol(q.kind, p, fwd, q.strike, fix, ann, 0.0).ok(),
            })
            .collect();
        model = fitted.model;
        report.stages.push(StageReport {
            market: Market::Nominal,
            stage: y,
            objective_kind: config.nominal_objective,
            objective,
            evaluations,
            stop,
            parameters: chosen.to_document(),
            exponents: [model.layout().bar_u[k - 2], model.layout().bar_u[k - 1]],
            improvements: improvements(&trace),
            residuals,
            lower_bounds: audit(&model, k, config.lower_bound_threshold)?,
        });
    }
    report.term_structure_error = max_rel_error(&model, &discounts, None)?;
    report.lower_bounds = audit(&model, 2, config.lower_bound_threshold)?;
    Ok((model, report))
}

/// Calibrates `X^{M+1}..X^{2M}` and `v̄` forwards in maturity. Stage `y` fits `X^{M+y}` to
/// caps and floors on `F_I(T_{2y}, T_{2y-2}, T_{2y})`, refitting `v̄_{2y-1}, v̄_{2y}` to the
/// inflation-linked term structure inside every objective evaluation.
pub fn calibrate_inflation(
    snapshot: &MarketSnapshot,
    nominal: &InflationModel<f64>,
    config: &CalibrationConfig,
) -> Result<(InflationModel<f64>, CalibrationReport)> {
    config.validate()?;
    snapshot.validate()?;
    let m = nominal.years();
    let n = 2 * m;
    let discounts = snapshot.discounts(m)?;
    let ilb = snapshot.ilb_ratios(m)?;
    let spec = if nominal.has_inflation() {
        nominal.spec().clone()
    } else {
        let mut comps = nominal.spec().components().to_vec();
        comps.extend(std::iter::repeat_n(config.inflation_initial()?, m));
        ProcessSpec::from_components(comps, nominal.horizon())?
    };
    let tilde_v = match &config.tilde_v {
        Some(t) if t.len() == n => t.clone(),
        Some(t) => {
            return Err(RatesError::InvalidParameter(format!(
                "tilde_v has {} entries, expected {n}",
                t.len()
            )))
        }
        None => default_tilde_v(&nominal.layout().tilde_u, config.tilde_v_slope),
    };
    let mut layout = nominal.layout().clone();
    layout.tilde_v = tilde_v.clone();
    layout.bar_v = vec![0.0; n];
    let start_model = InflationModel::new(spec, layout, nominal.p0t()).map_err(|e| infeasible(0, e))?;
    let mut model = start_model
        .fit_vbar_sequence(&tilde_v, &ilb, config.root_policy)
        .map_err(|e| infeasible(0, e))?
        .0;

    let fopts = config.fourier();
    let mut report = CalibrationReport::default();
    for y in 1..=m {
        let (kj, k) = (2 * y - 2, 2 * y);
        let expiry = model.date(k);
        let span = expiry - model.date(kj);
        let quotes: Vec<Quote> = snapshot
            .inflation_options_for_year(y)
            .iter()
            .map(|q| Quote {
                kind: q.kind.option_kind(),
                strike: q.strike,
                price: q.price_bps * 1e-4,
                vol: None,
            })
            .collect();
        let scorer = Scorer {
            objective: config.inflation_objective,
            expiry,
            shift: config.inflation_vol_shift,
            penalty: config.vol_penalty,
        };
        let base = model.clone();
        let i = m + y;
        let build = |c: Component<f64>| -> Result<InflationModel<f64>> {
            let cand = InflationModel::new(base.spec().with_component(i, c)?, base.layout().clone(), base.p0t())?;
            let mut layout = cand.layout().clone();
            for j in [k - 1, k] {
                layout.bar_v[j - 1] = cand.fit_vbar(j, ilb[j - 1], config.root_policy)?.value;
            }
            if let Component::DoubleGammaOuBm {
                alpha_plus,
                alpha_minus,
                ..
            } = c
            {
                let used = layout.bar_v[k - 2].abs().max(layout.bar_v[k - 1].abs());
                if !(alpha_plus.min(alpha_minus) > used + config.alpha_margin) {
                    return Err(RatesError::Domain(format!("jump rates too close to exponent {used}")));
                }
            }
            cand.with_layout(layout)
        };
        let fit = |c: Component<f64>| -> Result<Fitted> {
            let model = build(c)?;
            let prices = quotes
                .par_iter()
                .map(|q| model.inflation_option_price_with(q.kind, kj, k, q.strike, &fopts))
                .collect::<Result<Vec<_>>>()?;
            Ok(Fitted { model, prices })
        };
        let score = |f: &Fitted| -> Result<f64> {
            let fwd = f.model.forward_inflation_rate0(kj, k)?;
            Ok(scorer.score(&quotes, &f.prices, fwd, span * f.model.discount(k)?))
        };
        let start = match report.stages.last() {
            Some(prev) if config.warm_start && prev.stop.is_some() && fit(*base.spec().component(i - 1)).is_ok() => {
                *base.spec().component(i - 1)
            }
            _ => *base.spec().component(i),
        };
        let (chosen, stop, evaluations, trace) = if quotes.is_empty() {
            (start, None, 0, vec![])
        } else {
            let param = Parameterisation::new(&start, &config.inflation_bounds)?;
            let objective = |x: &[f64]| -> f64 {
                param
                    .decode(x)
                    .and_then(|c| fit(c).ok())
                    .and_then(|f| score(&f).ok())
                    .unwrap_or(f64::INFINITY)
            };
            let r = nelder_mead(objective, &param.encode(&start), &config.simplex());
            if !r.value.is_finite() {
                return Err(infeasible(
                    y,
                    RatesError::Infeasible("no admissible parameters found".into()),
                ));
            }
            (
                param.decode(&r.x).expect("best point is admissible"),
                Some(r.stop),
                r.evaluations,
                r.trace,
            )
        };
        let fitted = fit(chosen).map_err(|e| infeasible(y, e))?;
        let objective = score(&fitted)?;
        let fwd = fitted.model.forward_inflation_rate0(kj, k)?;
        let ann = span * fitted.model.discount(k)?;
        let residuals = quotes
            .iter()
            .zip(&fitted.prices)
            .map(|(q, &p)| QuoteResidual {
                stage: y,
                expiry_years: expiry,
                strike: q.strike,
                kind: if q.kind == OptionKind::Call { "cap" } else { "floor" }.into(),
                market_price: q.price,
                model_price: p,
                market_vol: scorer.vol(q.kind, q.price, fwd, q.strike, ann),
                model_vol: scorer.vol(q.kind, p, fwd, q.strike, ann),
            })
            .collect();
        model = fitted.model;
        report.stages.push(StageReport {
            market: Market::Inflation,
            stage: y,
            objective_kind: config.inflation_objective,
            objective,
            evaluations,
            stop,
            parameters: chosen.to_document(),
            exponents: [model.layout().bar_v[k - 2], model.layout().bar_v[k - 1]],
            improvements: improvements(&trace),
            residuals,
            lower_bounds: vec![],
        });
    }
    report.term_structure_error = max_rel_error(&model, &discounts, Some(&ilb))?;
    report.lower_bounds = audit(&model, 2, config.lower_bound_threshold)?;
    Ok((model, report))
}
