use super::estimate::{mc_price_many, McEstimate};
use super::simulate::SimConfig;
use crate::cosh::CoshLiborModel;
use crate::error::{RatesError, Result};

fn scale(est: Vec<McEstimate>, p0t: f64) -> Vec<McEstimate> {
    est.into_iter()
        .map(|e| McEstimate {
            estimate: e.estimate * p0t,
            std_error: e.std_error * p0t,
        })
        .collect()
}

fn rate_options(
    model: &CoshLiborModel<f64>,
    k: usize,
    strikes: &[f64],
    cfg: &SimConfig,
    call: bool,
) -> Result<Vec<McEstimate>> {
    if k == 0 || k >= model.grid().len() {
        return Err(RatesError::InvalidParameter(format!(
            "fixing index {k} outside 1..{}",
            model.grid().len()
        )));
    }
    let t = model.grid().date(k);
    let a = model.terms(t, model.u(k))?;
    let b = model.terms(t, model.u(k + 1))?;
    let d = model.grid().accrual(k + 1);
    let est = mc_price_many(model.spec(), &[t], cfg, strikes.len(), |p, out| {
        let x = p.state(0)[0];
        let (ma, mb) = (a.value(x), b.value(x));
        for (o, &s) in out.iter_mut().zip(strikes) {
            let v = (1.0 + d * s) * mb - ma;
            *o = if call { (-v).max(0.0) } else { v.max(0.0) };
        }
    })?;
    Ok(scale(est, model.p0t()))
}

/// Floorlets on `F^{k+1}` for several strikes, priced on shared paths.
pub fn floorlet_mc(model: &CoshLiborModel<f64>, k: usize, strikes: &[f64], cfg: &SimConfig) -> Result<Vec<McEstimate>> {
    rate_options(model, k, strikes, cfg, false)
}

/// Caplets on `F^{k+1}` for several strikes, priced on shared paths.
pub fn caplet_mc(model: &CoshLiborModel<f64>, k: usize, strikes: &[f64], cfg: &SimConfig) -> Result<Vec<McEstimate>> {
    rate_options(model, k, strikes, cfg, true)
}

/// Put swaption with expiry `T_α` on `[T_α, T_β]`.
pub fn put_swaption_mc(
    model: &CoshLiborModel<f64>,
    alpha: usize,
    beta: usize,
    strike: f64,
    cfg: &SimConfig,
) -> Result<McEstimate> {
    if !(alpha >= 1 && alpha < beta && beta <= model.grid().len()) {
        return Err(RatesError::InvalidParameter(format!(
            "need 1 ≤ α < β ≤ N, got α={alpha}, β={beta}"
        )));
    }
    let t = model.grid().date(alpha);
    let base = model.terms(t, model.u(alpha))?;
    let mut legs = Vec::new();
    for k in alpha + 1..=beta {
        let c = strike * model.grid().accrual(k) + if k == beta { 1.0 } else { 0.0 };
        legs.push((c, model.terms(t, model.u(k))?));
    }
    let est = mc_price_many(model.spec(), &[t], cfg, 1, |p, out| {
        let x = p.state(0)[0];
        let v = legs.iter().fold(-base.value(x), |s, (c, m)| s + c * m.value(x));
        out[0] = v.max(0.0);
    })?;
    Ok(scale(est, model.p0t())[0])
}
