//! Cosh-martingale bond ratios and term-structure fitting.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::bounds::locate_max;
use super::grid::TenorGrid;
use crate::affine::ProcessSpec;
use crate::error::{RatesError, Result};
use crate::numerics::bisect;
use crate::real::Real;

/// `log M^u` at one time as an explicit function of the state: the two exponential
/// branches `(φ(±u), ψ(±u))` on the remaining horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoshTerms<T> {
    pub u: T,
    pub phi_plus: T,
    pub psi_plus: T,
    pub phi_minus: T,
    pub psi_minus: T,
}

impl<T: Real> CoshTerms<T> {
    pub fn new(spec: &ProcessSpec<T>, remaining: T, u: T) -> Result<Self> {
        let (pp, sp) = spec.phi_psi_1d(remaining, Complex::new(u, T::zero()))?;
        let (pm, sm) = spec.phi_psi_1d(remaining, Complex::new(-u, T::zero()))?;
        Ok(CoshTerms {
            u,
            phi_plus: pp.re,
            psi_plus: sp.re,
            phi_minus: pm.re,
            psi_minus: sm.re,
        })
    }

    /// `log M(x)`, evaluated as a log-sum-exp.
    pub fn log_value(&self, x: T) -> T {
        let a = self.phi_plus + self.psi_plus * x;
        let b = self.phi_minus + self.psi_minus * x;
        let m = a.max(b);
        m + ((a - m).exp() + (b - m).exp()).ln() - T::LN_2()
    }

    pub fn value(&self, x: T) -> T {
        self.log_value(x).exp()
    }

    /// `dM/dx`.
    pub fn derivative(&self, x: T) -> T {
        let h = T::c(0.5);
        h * (self.psi_plus * (self.phi_plus + self.psi_plus * x).exp()
            + self.psi_minus * (self.phi_minus + self.psi_minus * x).exp())
    }
}

/// One-factor LIBOR model whose bond ratios are cosh martingales of an affine process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CoshModelDocument<T>", into = "CoshModelDocument<T>")]
#[serde(bound = "T: Real")]
pub struct CoshLiborModel<T> {
    spec: ProcessSpec<T>,
    grid: TenorGrid<T>,
    u_seq: Vec<T>,
    p0t: T,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
struct CoshModelDocument<T> {
    spec: ProcessSpec<T>,
    grid: TenorGrid<T>,
    u_seq: Vec<T>,
    #[serde(rename = "P0T")]
    p0t: T,
}

impl<T: Real> TryFrom<CoshModelDocument<T>> for CoshLiborModel<T> {
    type Error = RatesError;
    fn try_from(d: CoshModelDocument<T>) -> Result<Self> {
        CoshLiborModel::new(d.spec, d.grid, d.u_seq, d.p0t)
    }
}

impl<T: Real> From<CoshLiborModel<T>> for CoshModelDocument<T> {
    fn from(m: CoshLiborModel<T>) -> Self {
        CoshModelDocument {
            spec: m.spec,
            grid: m.grid,
            u_seq: m.u_seq,
            p0t: m.p0t,
        }
    }
}

/// Largest `u ≥ 0` with `±u` strictly inside the time-uniform domain.
pub fn symmetric_reach<T: Real>(spec: &ProcessSpec<T>) -> T {
    let (lo, hi) = spec.uniform_domain().intervals[0];
    hi.min(-lo)
}

fn log_m0<T: Real>(spec: &ProcessSpec<T>, horizon: T, u: T) -> Result<T> {
    Ok(CoshTerms::new(spec, horizon, u)?.log_value(spec.x0()[0]))
}

/// Solves `M₀^{u_k} = ratio_k` for a nonincreasing, nonnegative sequence `u_k`.
/// `ratios[k-1] = P(0,T_k)/P(0,T_N)`.
pub fn fit_u_sequence<T: Real>(spec: &ProcessSpec<T>, grid: &TenorGrid<T>, ratios: &[T]) -> Result<Vec<T>> {
    if spec.dim() != 1 {
        return Err(RatesError::WrongSpec(
            "cosh model needs a one-dimensional process".into(),
        ));
    }
    if ratios.len() != grid.len() {
        return Err(RatesError::InvalidParameter("one ratio per tenor date expected".into()));
    }
    let horizon = grid.last();
    let eps = T::c(1e-14);
    for (k, w) in ratios.windows(2).enumerate() {
        if w[1] > w[0] * (T::one() + eps) {
            return Err(RatesError::NonmonotoneInput(format!(
                "ratio {} exceeds ratio {}",
                k + 2,
                k + 1
            )));
        }
    }
    if let Some(k) = ratios.iter().position(|&r| !(r >= T::one() - eps)) {
        return Err(RatesError::NonmonotoneInput(format!(
            "ratio {} below one (negative forward)",
            k + 1
        )));
    }
    let reach = symmetric_reach(spec);
    let mut u_max = if reach.is_finite() {
        T::c(0.999) * reach
    } else {
        T::one()
    };
    let mut u_seq = Vec::with_capacity(ratios.len());
    let mut cap = u_max;
    for (k, &r) in ratios.iter().enumerate() {
        if r <= T::one() {
            u_seq.push(T::zero());
            cap = T::zero();
            continue;
        }
        let target = r.ln();
        let f = |u: T| log_m0(spec, horizon, u).map(|v| v - target).unwrap_or(T::infinity());
        while !reach.is_finite() && f(u_max) < T::zero() {
            u_max = u_max + u_max;
            cap = cap.max(u_max);
            if u_max > T::c(1e8) {
                break;
            }
        }
        if f(u_max) < T::zero() {
            return Err(RatesError::Infeasible(format!(
                "ratio {} = {} exceeds the attainable maximum {}",
                k + 1,
                r,
                log_m0(spec, horizon, u_max)?.exp()
            )));
        }
        let u = bisect(f, T::zero(), u_max, T::c(1e-15))?;
        let u = u.min(cap);
        u_seq.push(u);
        cap = u;
    }
    Ok(u_seq)
}

impl<T: Real> CoshLiborModel<T> {
    pub fn new(spec: ProcessSpec<T>, grid: TenorGrid<T>, u_seq: Vec<T>, p0t: T) -> Result<Self> {
        if spec.dim() != 1 {
            return Err(RatesError::WrongSpec(
                "cosh model needs a one-dimensional process".into(),
            ));
        }
        if u_seq.len() != grid.len() {
            return Err(RatesError::InvalidParameter("one u per tenor date expected".into()));
        }
        if grid.last() > spec.horizon() * (T::one() + T::c(1e-12)) {
            return Err(RatesError::InvalidParameter(
                "tenor grid extends beyond the process horizon".into(),
            ));
        }
        if !(p0t > T::zero() && p0t <= T::one()) {
            return Err(RatesError::InvalidParameter(
                "terminal discount must lie in (0, 1]".into(),
            ));
        }
        let reach = symmetric_reach(&spec);
        for (k, w) in u_seq.windows(2).enumerate() {
            if w[1] > w[0] {
                return Err(RatesError::InvalidParameter(format!(
                    "u sequence increases at index {}",
                    k + 2
                )));
            }
        }
        for (k, &u) in u_seq.iter().enumerate() {
            if !(u >= T::zero()) || !(u < reach) {
                return Err(RatesError::Domain(format!(
                    "u_{} = {} not admissible (reach {})",
                    k + 1,
                    u,
                    reach
                )));
            }
        }
        Ok(CoshLiborModel { spec, grid, u_seq, p0t })
    }

    /// Fits `u` to a discount curve given as `P(0,T_k)` for `k = 1..N`.
    pub fn fit(spec: ProcessSpec<T>, grid: TenorGrid<T>, discounts: &[T]) -> Result<Self> {
        let p0t = *discounts
            .last()
            .ok_or_else(|| RatesError::InvalidParameter("empty curve".into()))?;
        let ratios: Vec<T> = discounts.iter().map(|&p| p / p0t).collect();
        let u = fit_u_sequence(&spec, &grid, &ratios)?;
        Self::new(spec, grid, u, p0t)
    }

    pub fn spec(&self) -> &ProcessSpec<T> {
        &self.spec
    }

    pub fn grid(&self) -> &TenorGrid<T> {
        &self.grid
    }

    pub fn u_seq(&self) -> &[T] {
        &self.u_seq
    }

    /// `u_k`, 1-based.
    pub fn u(&self, k: usize) -> T {
        self.u_seq[k - 1]
    }

    pub fn p0t(&self) -> T {
        self.p0t
    }

    pub fn horizon(&self) -> T {
        self.grid.last()
    }

    pub fn x0(&self) -> T {
        self.spec.x0()[0]
    }

    pub fn terms(&self, t: T, u: T) -> Result<CoshTerms<T>> {
        let rem = self.horizon() - t;
        if rem < -self.horizon() * T::c(1e-12) || t < T::zero() {
            return Err(RatesError::InvalidTime {
                t: t.to_f64().unwrap_or(f64::NAN),
                horizon: self.horizon().to_f64().unwrap_or(f64::NAN),
            });
        }
        CoshTerms::new(&self.spec, rem.max(T::zero()), u)
    }

    /// `M_t^u(x)`.
    pub fn cosh_martingale(&self, t: T, u: T, x: T) -> Result<T> {
        Ok(self.terms(t, u)?.value(x))
    }

    /// Model discount factor `P(0,T_k)`; `k = 0` gives 1.
    pub fn discount(&self, k: usize) -> Result<T> {
        if k == 0 {
            return Ok(T::one());
        }
        Ok(self.p0t * self.cosh_martingale(T::zero(), self.u(k), self.x0())?)
    }

    /// Simple forward rate `F^k(0)` over `[T_{k-1}, T_k]`.
    pub fn forward_rate(&self, k: usize) -> Result<T> {
        Ok((self.discount(k - 1)? / self.discount(k)? - T::one()) / self.grid.accrual(k))
    }

    /// Infimum over the state of `F^k(t)`, located at the maximum of `M^{u_k}/M^{u_{k-1}}`.
    pub fn forward_rate_lower_bound(&self, k: usize, t: T) -> Result<T> {
        if k == 0 || k > self.grid.len() {
            return Err(RatesError::InvalidParameter(format!(
                "forward index {k} outside 1..={}",
                self.grid.len()
            )));
        }
        if k == 1 {
            return self.forward_rate(1);
        }
        let (a, b) = (self.u(k - 1), self.u(k));
        if a == b {
            return Ok(T::zero());
        }
        let ta = self.terms(t, a)?;
        let tb = self.terms(t, b)?;
        let r = |x: T| (tb.log_value(x) - ta.log_value(x)).exp();
        let (_, rmax) = locate_max(&r, self.x0())?;
        Ok((T::one() / rmax - T::one()) / self.grid.accrual(k))
    }
}
