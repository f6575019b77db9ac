//! Closed forms for the standard Brownian cosh model (σ = 1, μ = 0, x₀ = 0).

use super::model::CoshLiborModel;
use crate::affine::Component;
use crate::error::{RatesError, Result};
use crate::numerics::{bisect, norm_cdf};
use crate::real::Real;

fn log_cosh<T: Real>(y: T) -> T {
    let a = y.abs();
    a + (-(a + a)).exp().ln_1p() - T::LN_2()
}

fn require_standard<T: Real>(model: &CoshLiborModel<T>) -> Result<()> {
    match *model.spec().component(0) {
        Component::BrownianDrift { sigma, mu, x0 } if sigma == T::one() && mu == T::zero() && x0 == T::zero() => Ok(()),
        _ => Err(RatesError::WrongSpec(
            "closed forms need BrownianDrift(σ=1, μ=0, x₀=0)".into(),
        )),
    }
}

/// Positive root of an even trigger that decreases on `[0, ∞)`; zero when `g(0) ≤ 0`,
/// infinite when `g` stays positive.
fn symmetric_root<T: Real, G: Fn(T) -> T>(g: G) -> Result<T> {
    if !(g(T::zero()) > T::zero()) {
        return Ok(T::zero());
    }
    let mut hi = T::one();
    while g(hi) > T::zero() {
        hi = hi + hi;
        if hi > T::c(1e12) {
            return Ok(T::infinity());
        }
    }
    bisect(g, T::zero(), hi, T::c(1e-15))
}

/// `E[M^u_{t}(B_t) 1{|B_t| < κ}] = e^{u²T/2} [Φ(κ/√t - u√t) - Φ(-κ/√t - u√t)]`.
fn window<T: Real>(u: T, horizon: T, t: T, kappa: T) -> T {
    let s = t.sqrt();
    let a = if kappa.is_infinite() { T::infinity() } else { kappa / s };
    (u * u * horizon / T::c(2.0)).exp() * (norm_cdf(a - u * s) - norm_cdf(-a - u * s))
}

/// Floorlet on `F^{k+1}` in closed form.
pub fn brownian_closed_form_floorlet<T: Real>(model: &CoshLiborModel<T>, k: usize, strike: T) -> Result<T> {
    require_standard(model)?;
    let grid = model.grid();
    if k == 0 || k >= grid.len() {
        return Err(RatesError::InvalidParameter(format!(
            "fixing index {k} outside 1..{}",
            grid.len()
        )));
    }
    let horizon = model.horizon();
    let tk = grid.date(k);
    let (ua, ub) = (model.u(k), model.u(k + 1));
    let kt = T::one() + grid.accrual(k + 1) * strike;
    let shift = (ua * ua - ub * ub) * (horizon - tk) / T::c(2.0);
    let g = |x: T| kt - (shift + log_cosh(ua * x) - log_cosh(ub * x)).exp();
    let kappa = symmetric_root(g)?;
    if kappa == T::zero() {
        return Ok(T::zero());
    }
    let p = model.p0t();
    Ok(kt * p * window(ub, horizon, tk, kappa) - p * window(ua, horizon, tk, kappa))
}

/// Put swaption with expiry `T_α` on `[T_α, T_β]` in closed form.
pub fn brownian_closed_form_put_swaption<T: Real>(
    model: &CoshLiborModel<T>,
    alpha: usize,
    beta: usize,
    strike: T,
) -> Result<T> {
    require_standard(model)?;
    let grid = model.grid();
    if !(alpha >= 1 && alpha < beta && beta <= grid.len()) {
        return Err(RatesError::InvalidParameter(format!(
            "need 1 ≤ α < β ≤ N, got α={alpha}, β={beta}"
        )));
    }
    let horizon = model.horizon();
    let ta = grid.date(alpha);
    let rem = horizon - ta;
    let log_m = |u: T, x: T| u * u * rem / T::c(2.0) + log_cosh(u * x);
    let ua = model.u(alpha);
    let coef = |k: usize| {
        let c = strike * grid.accrual(k);
        if k == beta {
            c + T::one()
        } else {
            c
        }
    };
    let g = |x: T| {
        let base = log_m(ua, x);
        (alpha + 1..=beta).fold(-T::one(), |s, k| s + coef(k) * (log_m(model.u(k), x) - base).exp())
    };
    let kappa = symmetric_root(g)?;
    if kappa == T::zero() {
        return Ok(T::zero());
    }
    let p = model.p0t();
    let mut v = -window(ua, horizon, ta, kappa);
    for k in alpha + 1..=beta {
        v = v + coef(k) * window(model.u(k), horizon, ta, kappa);
    }
    Ok(p * v)
}
