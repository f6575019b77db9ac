use super::estimate::{mc_price_many, McEstimate};
use super::simulate::SimConfig;
use crate::black::OptionKind;
use crate::error::{RatesError, Result};
use crate::inflation::InflationModel;

/// `x ↦ M_t^u(x)` with `φ`, `ψ` precomputed.
struct Martingale {
    phi: f64,
    psi: Vec<f64>,
}

impl Martingale {
    fn new(model: &InflationModel<f64>, t: f64, u: &[f64]) -> Result<Self> {
        let (phi, psi) = model.ab(t, u, &vec![0.0; u.len()])?;
        Ok(Martingale { phi, psi })
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.phi + self.psi.iter().zip(x).map(|(p, xi)| p * xi).sum::<f64>()).exp()
    }
}

fn payoff(kind: OptionKind, a: f64, b: f64) -> f64 {
    match kind {
        OptionKind::Call => (a - b).max(0.0),
        OptionKind::Put => (b - a).max(0.0),
    }
}

fn scaled(est: Vec<McEstimate>, f: f64) -> Vec<McEstimate> {
    est.into_iter()
        .map(|e| McEstimate {
            estimate: e.estimate * f,
            std_error: e.std_error * f,
        })
        .collect()
}

/// CPI options `(I(T_k) - K)^+` under `Q^T` with weight `M^{u_k}_{T_k}`.
pub fn cpi_option_mc(
    model: &InflationModel<f64>,
    kind: OptionKind,
    k: usize,
    strikes: &[f64],
    cfg: &SimConfig,
) -> Result<Vec<McEstimate>> {
    let t = model.date(k);
    let mu = Martingale::new(model, t, model.u(k))?;
    let mv = Martingale::new(model, t, model.v(k))?;
    let est = mc_price_many(model.spec(), &[t], cfg, strikes.len(), |p, out| {
        let x = p.state(0);
        let (a, b) = (mv.value(x), mu.value(x));
        for (o, &s) in out.iter_mut().zip(strikes) {
            *o = payoff(kind, a, s * b);
        }
    })?;
    Ok(scaled(est, model.p0t()))
}

/// Caplets/floorlets on `F^k` (fixing `T_{k-1}`, payment `T_k`).
pub fn nominal_option_mc(
    model: &InflationModel<f64>,
    kind: OptionKind,
    k: usize,
    strikes: &[f64],
    cfg: &SimConfig,
) -> Result<Vec<McEstimate>> {
    if k < 2 || k > model.n() {
        return Err(RatesError::InvalidParameter(format!(
            "index {k} outside 2..={}",
            model.n()
        )));
    }
    let fix = model.date(k - 1);
    let tk = model.date(k);
    let d = model.grid().accrual(k);
    let prev = Martingale::new(model, fix, model.u(k - 1))?;
    let fix_k = Martingale::new(model, fix, model.u(k))?;
    let pay = Martingale::new(model, tk, model.u(k))?;
    let est = mc_price_many(model.spec(), &[fix, tk], cfg, strikes.len(), |p, out| {
        let x = p.state(0);
        let gross = prev.value(x) / fix_k.value(x);
        let w = pay.value(p.state(1));
        for (o, &s) in out.iter_mut().zip(strikes) {
            *o = w * payoff(kind, gross, 1.0 + d * s);
        }
    })?;
    Ok(scaled(est, model.p0t()))
}

fn index_at(model: &InflationModel<f64>, k: usize) -> Result<Option<(Martingale, Martingale)>> {
    if k == 0 {
        return Ok(None);
    }
    let t = model.date(k);
    Ok(Some((
        Martingale::new(model, t, model.v(k))?,
        Martingale::new(model, t, model.u(k))?,
    )))
}

/// Inflation caplets/floorlets on `F_I(T_k, T_{k-j}, T_k)`.
pub fn inflation_option_mc(
    model: &InflationModel<f64>,
    kind: OptionKind,
    kj: usize,
    k: usize,
    strikes: &[f64],
    cfg: &SimConfig,
) -> Result<Vec<McEstimate>> {
    if kj >= k || k > model.n() {
        return Err(RatesError::InvalidParameter(format!(
            "need 0 ≤ {kj} < {k} ≤ {}",
            model.n()
        )));
    }
    let span = model.date(k) - model.date(kj);
    let base = index_at(model, kj)?;
    let (mv, mu) = index_at(model, k)?.expect("k ≥ 1");
    let est = mc_price_many(
        model.spec(),
        &[model.date(kj), model.date(k)],
        cfg,
        strikes.len(),
        |p, out| {
            let i0 = base
                .as_ref()
                .map_or(1.0, |(v, u)| v.value(p.state(0)) / u.value(p.state(0)));
            let x = p.state(1);
            let (a, b) = (mv.value(x) / i0, mu.value(x));
            for (o, &s) in out.iter_mut().zip(strikes) {
                *o = payoff(kind, a, (1.0 + span * s) * b);
            }
        },
    )?;
    Ok(scaled(est, model.p0t()))
}

/// Forward inflation rate `F_I(0, T_{k-j}, T_k)` as a `Q^{T_k}` expectation.
pub fn forward_inflation_mc(model: &InflationModel<f64>, kj: usize, k: usize, cfg: &SimConfig) -> Result<McEstimate> {
    if kj >= k || k > model.n() {
        return Err(RatesError::InvalidParameter(format!(
            "need 0 ≤ {kj} < {k} ≤ {}",
            model.n()
        )));
    }
    let span = model.date(k) - model.date(kj);
    let base = index_at(model, kj)?;
    let (mv, _) = index_at(model, k)?.expect("k ≥ 1");
    let m0 = model.bond_ratio(k)?;
    let est = mc_price_many(model.spec(), &[model.date(kj), model.date(k)], cfg, 1, |p, out| {
        let i0 = base
            .as_ref()
            .map_or(1.0, |(v, u)| v.value(p.state(0)) / u.value(p.state(0)));
        out[0] = mv.value(p.state(1)) / i0 / m0;
    })?[0];
    Ok(McEstimate {
        estimate: (est.estimate - 1.0) / span,
        std_error: est.std_error / span,
    })
}
