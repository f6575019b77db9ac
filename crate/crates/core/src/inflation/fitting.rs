use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::layout::{year_of, ParamLayout};
use super::model::InflationModel;
use crate::affine::{Component, ProcessSpec};
use crate::error::{RatesError, Result};
use crate::numerics::{bisect, golden_max};
use crate::real::Real;

/// Which root of the convex fitting function to keep for real-valued inflation processes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootPolicy {
    /// With one negative and one positive root, keep the positive one.
    #[default]
    Positive,
    /// With one negative and one positive root, keep the negative one.
    Negative,
}

/// Result of fitting one `v̄_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct VbarFit<T> {
    pub value: T,
    pub roots: Vec<T>,
    /// Both roots share a sign, so the smaller one in magnitude was taken.
    pub ambiguous: bool,
}

/// `log E[e^{w X_T}]` of one component started at its `x0`.
fn log_mgf<T: Real>(c: &Component<T>, horizon: T, w: T) -> Result<T> {
    let (phi, psi) = c.phi_psi(horizon, Complex::new(w, T::zero()))?;
    Ok(phi.re + psi.re * c.x0())
}

/// Admissible search interval for one exponent, capped at `±cap` for unbounded domains.
fn search_interval<T: Real>(c: &Component<T>, horizon: T, cap: T) -> (T, T) {
    let (lo, hi) = c.domain(horizon);
    let shrink = |b: T| {
        if b.is_finite() {
            b - b.abs() * T::c(1e-10) * b.signum()
        } else {
            cap * b.signum()
        }
    };
    (shrink(lo).max(-cap), shrink(hi).min(cap))
}

/// Solves `log E[e^{w X_T}] = target` for `w ≥ 0` on a nonnegative component.
fn solve_nonnegative<T: Real>(c: &Component<T>, horizon: T, target: T, what: &str) -> Result<T> {
    if target.abs() <= T::c(1e-15) {
        return Ok(T::zero());
    }
    if target < T::zero() {
        return Err(RatesError::Infeasible(format!(
            "{what}: target needs a negative exponent"
        )));
    }
    let (_, hi) = search_interval(c, horizon, T::c(1e6));
    let g = |w: T| log_mgf(c, horizon, w).map(|v| v - target).unwrap_or(T::infinity());
    let mut b = hi.min(T::one());
    while g(b) < T::zero() && b < hi {
        b = (b + b).min(hi);
    }
    if g(b) < T::zero() {
        return Err(RatesError::Infeasible(format!(
            "{what}: target {target} beyond the attainable maximum"
        )));
    }
    bisect(g, T::zero(), b, T::c(1e-16))
}

/// `ũ_k` with `E^{Q^T}[e^{2ũ_k X⁰_T}] = P(0,T_k)/P(0,T)`.
pub fn default_tilde_u<T: Real>(spec: &ProcessSpec<T>, ratios: &[T]) -> Result<Vec<T>> {
    let c = spec.component(0);
    let mut prev = T::infinity();
    ratios
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            let w = solve_nonnegative(c, spec.horizon(), r.ln(), &format!("tilde_u_{}", k + 1))? / T::c(2.0);
            let w = w.min(prev);
            prev = w;
            Ok(w)
        })
        .collect()
}

/// `ṽ_k = ũ_k (1 + c k)`.
pub fn default_tilde_v<T: Real>(tilde_u: &[T], c: T) -> Vec<T> {
    tilde_u
        .iter()
        .enumerate()
        .map(|(i, &u)| u * (T::one() + c * T::from_usize_(i + 1)))
        .collect()
}

/// Backward recursion for `ū_N, …, ū_1` given `ũ` and the processes `X⁰..X^M`.
/// `ratios[k-1] = P(0,T_k)/P(0,T)`.
pub fn fit_ubar_sequence<T: Real>(spec: &ProcessSpec<T>, m: usize, tilde_u: &[T], ratios: &[T]) -> Result<Vec<T>> {
    let mut bar = vec![T::zero(); 2 * m];
    fit_ubar_range(spec, m, tilde_u, ratios, &mut bar, 1, 2 * m)?;
    Ok(bar)
}

/// Refits `ū_hi, …, ū_lo` in place, backwards; entries above `hi` are taken as given.
pub fn fit_ubar_range<T: Real>(
    spec: &ProcessSpec<T>,
    m: usize,
    tilde_u: &[T],
    ratios: &[T],
    bar: &mut [T],
    lo: usize,
    hi: usize,
) -> Result<()> {
    let n = 2 * m;
    if ratios.len() != n || tilde_u.len() != n || bar.len() != n || spec.dim() < m + 1 {
        return Err(RatesError::InvalidParameter(format!(
            "expected {n} ratios and tilde_u values, {} components",
            m + 1
        )));
    }
    if lo == 0 || lo > hi || hi > n {
        return Err(RatesError::InvalidParameter(format!(
            "index range {lo}..={hi} outside 1..={n}"
        )));
    }
    let h = spec.horizon();
    for k in (lo..=hi).rev() {
        let y = year_of(k);
        let mut target = ratios[k - 1].ln() - log_mgf(spec.component(0), h, tilde_u[k - 1])?;
        for l in y + 1..=m {
            target = target - log_mgf(spec.component(l), h, bar[2 * l - 2])?;
        }
        bar[k - 1] = solve_nonnegative(spec.component(y), h, target, &format!("bar_u_{k}"))
            .map_err(|e| RatesError::Infeasible(format!("index {k}: {e}")))?;
    }
    Ok(())
}

impl<T: Real> InflationModel<T> {
    /// Nominal model reproducing `discounts[k-1] = P(0,T_k)`, `k = 1..2M`.
    /// Inflation exponents start at `ṽ = ũ`, `v̄ = 0`.
    pub fn fit_nominal(spec: ProcessSpec<T>, m: usize, tilde_u: Option<Vec<T>>, discounts: &[T]) -> Result<Self> {
        let n = 2 * m;
        if discounts.len() != n {
            return Err(RatesError::InvalidParameter(format!("{n} discount factors expected")));
        }
        let p0t = discounts[n - 1];
        let ratios: Vec<T> = discounts.iter().map(|&d| d / p0t).collect();
        let tilde_u = match tilde_u {
            Some(t) => t,
            None => default_tilde_u(&spec, &ratios)?,
        };
        let bar_u = fit_ubar_sequence(&spec, m, &tilde_u, &ratios)?;
        InflationModel::new(spec, ParamLayout::nominal(m, tilde_u, bar_u)?, p0t)
    }

    /// `P(0,T_k)/P(0,T)` for `k = 1..N`.
    pub fn bond_ratios(&self) -> Result<Vec<T>> {
        (1..=self.n()).map(|k| self.bond_ratio(k)).collect()
    }

    /// Refits `ū` to `ratios` with the current `ũ` and processes.
    pub fn refit_ubar(&self, ratios: &[T]) -> Result<Self> {
        let bar_u = fit_ubar_sequence(self.spec(), self.years(), &self.layout().tilde_u, ratios)?;
        let mut layout = self.layout().clone();
        layout.bar_u = bar_u;
        self.with_layout(layout)
    }

    /// Solves `M_0^{v_k} = target` for `v̄_k` with everything else fixed.
    pub fn fit_vbar(&self, k: usize, target: T, policy: RootPolicy) -> Result<VbarFit<T>> {
        self.check_index(k, 1)?;
        self.need_inflation()?;
        let i = self.years() + year_of(k);
        let c = self.spec().component(i);
        let h = self.horizon();
        let mut v = self.v(k).to_vec();
        v[i] = T::zero();
        let rest = self.log_martingale(T::zero(), &v, &self.x0())?;
        let level = target.ln() - rest;
        let g = |w: T| log_mgf(c, h, w).map(|x| x - level).unwrap_or(T::infinity());
        let what = format!("bar_v_{k}");
        if level.abs() <= T::c(1e-15) {
            return Ok(VbarFit {
                value: T::zero(),
                roots: vec![T::zero()],
                ambiguous: false,
            });
        }
        let (a, b) = search_interval(c, h, T::c(1e4));
        let (wmin, neg_gmin) = golden_max(|w| -g(w), a, b, T::c(1e-12));
        let gmin = -neg_gmin;
        if gmin > T::zero() {
            return Err(RatesError::Infeasible(format!(
                "{what}: minimum {gmin} above the target"
            )));
        }
        let mut roots = Vec::new();
        if g(a) >= T::zero() && wmin > a {
            roots.push(bisect(g, a, wmin, T::c(1e-16))?);
        }
        if g(b) >= T::zero() && wmin < b {
            roots.push(bisect(g, wmin, b, T::c(1e-16))?);
        }
        let (value, ambiguous) = match roots.as_slice() {
            [] => {
                return Err(RatesError::Infeasible(format!(
                    "{what}: target not attainable in the domain"
                )))
            }
            [r] => (*r, false),
            [lo, hi, ..] => {
                if *lo < T::zero() && *hi > T::zero() {
                    (if policy == RootPolicy::Positive { *hi } else { *lo }, false)
                } else {
                    let pick = if lo.abs() <= hi.abs() { *lo } else { *hi };
                    (pick, pick != T::zero())
                }
            }
        };
        Ok(VbarFit {
            value,
            roots,
            ambiguous,
        })
    }

    /// Fits `v̄_1..v̄_N` to `ilb_ratios[k-1] = P_ILB(0,T_k)/P(0,T)` with the given `ṽ`.
    pub fn fit_vbar_sequence(
        &self,
        tilde_v: &[T],
        ilb_ratios: &[T],
        policy: RootPolicy,
    ) -> Result<(Self, Vec<VbarFit<T>>)> {
        self.need_inflation()?;
        if tilde_v.len() != self.n() || ilb_ratios.len() != self.n() {
            return Err(RatesError::InvalidParameter(format!("{} values expected", self.n())));
        }
        let mut layout = self.layout().clone();
        layout.tilde_v = tilde_v.to_vec();
        layout.bar_v = vec![T::zero(); self.n()];
        let mut model = self.with_layout(layout.clone())?;
        let mut fits = Vec::with_capacity(self.n());
        for k in 1..=self.n() {
            let f = model.fit_vbar(k, ilb_ratios[k - 1], policy)?;
            layout.bar_v[k - 1] = f.value;
            fits.push(f);
        }
        model = model.with_layout(layout)?;
        Ok((model, fits))
    }
}
