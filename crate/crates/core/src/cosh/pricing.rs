//! Semi-analytic floorlet, caplet and put-swaption prices.

use num_complex::Complex;

use super::bounds::{find_exercise_bounds, ExerciseBounds};
use super::model::{CoshLiborModel, CoshTerms};
use crate::error::{RatesError, Result};
use crate::numerics::{integrate_semi_infinite, TailOptions};
use crate::real::Real;

#[derive(Debug, Clone, Copy)]
pub struct PricingOptions<T> {
    pub tail: TailOptions<T>,
    pub root_tol: T,
}

impl<T: Real> Default for PricingOptions<T> {
    fn default() -> Self {
        PricingOptions {
            tail: TailOptions::default(),
            root_tol: T::c(1e-12),
        }
    }
}

/// Payoff `Σ c_j M^{u_j}_{t}(x) · 1{κ₁ < x < κ₂}` paid in `Q^T` units at expiry `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoshPayoff<T> {
    pub expiry: T,
    pub terms: Vec<(T, CoshTerms<T>)>,
    pub bounds: ExerciseBounds<T>,
}

impl<T: Real> CoshPayoff<T> {
    pub fn value(&self, x: T) -> T {
        if self.bounds.degenerate || !(x > self.bounds.kappa1 && x < self.bounds.kappa2) {
            return T::zero();
        }
        self.terms.iter().fold(T::zero(), |s, (c, m)| s + *c * m.value(x))
    }
}

/// `(e^{wκ₂} - e^{wκ₁}) / w`, stable for small `w`.
fn window_transform<T: Real>(w: Complex<T>, k1: T, k2: T) -> Complex<T> {
    let len = k2 - k1;
    let y = w * len;
    let head = (w * k1).exp();
    if y.norm() < T::c(1e-3) {
        let one = Complex::new(T::one(), T::zero());
        let series = one + y * (one + y * (one + y * (one + y / T::c(5.0)) / T::c(4.0)) / T::c(3.0)) / T::c(2.0);
        head * series * len
    } else {
        ((w * k2).exp() - head) / w
    }
}

/// `h(z, u) = ∫_{κ₁}^{κ₂} e^{zx} dM^u(x)` from the branch terms of `M^u`.
pub fn h_from_terms<T: Real>(m: &CoshTerms<T>, z: Complex<T>, k1: T, k2: T) -> Result<Complex<T>> {
    let half = T::c(0.5);
    let mut acc = Complex::new(T::zero(), T::zero());
    for &(phi, psi) in &[(m.phi_plus, m.psi_plus), (m.phi_minus, m.psi_minus)] {
        let w = z + psi;
        if w.norm() <= T::c(1e-14) * (T::one() + psi.abs()) {
            return Err(RatesError::Pole(format!("{z} = -ψ = {}", -psi)));
        }
        if psi == T::zero() || k1 == k2 {
            continue;
        }
        acc = acc + window_transform(w, k1, k2) * (phi.exp() * psi * half);
    }
    Ok(acc)
}

impl<T: Real> CoshLiborModel<T> {
    /// `h^t_{κ₁,κ₂}(z, u)`.
    pub fn h_function(&self, t: T, z: Complex<T>, u: T, k1: T, k2: T) -> Result<Complex<T>> {
        h_from_terms(&self.terms(t, u)?, z, k1, k2)
    }

    fn check_fixing(&self, k: usize) -> Result<()> {
        if k == 0 || k >= self.grid().len() {
            return Err(RatesError::InvalidParameter(format!(
                "fixing index {k} outside 1..{}",
                self.grid().len()
            )));
        }
        Ok(())
    }

    /// Floorlet trigger `g(x) = 1 + Δ_{k+1}K - M^{u_k}_{T_k}(x)/M^{u_{k+1}}_{T_k}(x)`.
    pub fn floorlet_trigger(&self, k: usize, strike: T) -> Result<impl Fn(T) -> T> {
        self.check_fixing(k)?;
        let t = self.grid().date(k);
        let a = self.terms(t, self.u(k))?;
        let b = self.terms(t, self.u(k + 1))?;
        let kt = T::one() + self.grid().accrual(k + 1) * strike;
        Ok(move |x: T| kt - (a.log_value(x) - b.log_value(x)).exp())
    }

    /// Put-swaption trigger `g(x) = M^{u_β}/M^{u_α} + K Σ_{k=α+1}^{β} Δ_k M^{u_k}/M^{u_α} - 1` at `T_α`.
    pub fn swaption_trigger(&self, alpha: usize, beta: usize, strike: T) -> Result<impl Fn(T) -> T> {
        if !(alpha >= 1 && alpha < beta && beta <= self.grid().len()) {
            return Err(RatesError::InvalidParameter(format!(
                "need 1 ≤ α < β ≤ N, got α={alpha}, β={beta}"
            )));
        }
        let t = self.grid().date(alpha);
        let base = self.terms(t, self.u(alpha))?;
        let mut legs = Vec::with_capacity(beta - alpha);
        for k in alpha + 1..=beta {
            let mut c = strike * self.grid().accrual(k);
            if k == beta {
                c = c + T::one();
            }
            legs.push((c, self.terms(t, self.u(k))?));
        }
        Ok(move |x: T| {
            let lb = base.log_value(x);
            legs.iter()
                .fold(-T::one(), |s, (c, m)| s + *c * (m.log_value(x) - lb).exp())
        })
    }

    fn balance_point(&self, t: T, u: T) -> Result<T> {
        let m = self.terms(t, u)?;
        let d = m.psi_plus - m.psi_minus;
        Ok(if d > T::zero() {
            (m.phi_minus - m.phi_plus) / d
        } else {
            self.x0()
        })
    }

    pub fn floorlet_bounds(&self, k: usize, strike: T, tol: T) -> Result<ExerciseBounds<T>> {
        let g = self.floorlet_trigger(k, strike)?;
        find_exercise_bounds(g, self.balance_point(self.grid().date(k), self.u(k))?, tol)
    }

    pub fn swaption_bounds(&self, alpha: usize, beta: usize, strike: T, tol: T) -> Result<ExerciseBounds<T>> {
        let g = self.swaption_trigger(alpha, beta, strike)?;
        find_exercise_bounds(g, self.balance_point(self.grid().date(alpha), self.u(alpha))?, tol)
    }

    /// Floorlet payoff functional on `F^{k+1}` (fixing `T_k`, payment `T_{k+1}`) in `Q^T` units.
    pub fn floorlet_payoff(&self, k: usize, strike: T, tol: T) -> Result<CoshPayoff<T>> {
        let bounds = self.floorlet_bounds(k, strike, tol)?;
        let t = self.grid().date(k);
        let kt = T::one() + self.grid().accrual(k + 1) * strike;
        Ok(CoshPayoff {
            expiry: t,
            terms: vec![
                (kt, self.terms(t, self.u(k + 1))?),
                (-T::one(), self.terms(t, self.u(k))?),
            ],
            bounds,
        })
    }

    /// Put-swaption payoff functional (receive fixed `K` on `[T_α, T_β]`) in `Q^T` units.
    pub fn put_swaption_payoff(&self, alpha: usize, beta: usize, strike: T, tol: T) -> Result<CoshPayoff<T>> {
        let bounds = self.swaption_bounds(alpha, beta, strike, tol)?;
        let t = self.grid().date(alpha);
        let mut terms = vec![(-T::one(), self.terms(t, self.u(alpha))?)];
        for k in alpha + 1..=beta {
            let mut c = strike * self.grid().accrual(k);
            if k == beta {
                c = c + T::one();
            }
            terms.push((c, self.terms(t, self.u(k))?));
        }
        Ok(CoshPayoff {
            expiry: t,
            terms,
            bounds,
        })
    }

    /// Damping used when the caller gives none: midpoint of the pole-free gap just above 0,
    /// capped at 1/2 and shrunk for wide exercise windows so `e^{-Rκ}` stays moderate.
    pub fn default_contour(&self, payoff: &CoshPayoff<T>) -> T {
        let (_, hi) = self.spec().uniform_domain().intervals[0];
        let mut first = hi;
        for (_, m) in &payoff.terms {
            for p in [m.psi_plus, m.psi_minus] {
                if p > T::c(1e-12) && p < first {
                    first = p;
                }
            }
        }
        let reach = payoff.bounds.kappa1.abs().max(payoff.bounds.kappa2.abs()).max(T::one());
        (first / T::c(2.0)).min(T::c(0.5)).min(T::c(2.0) / reach)
    }

    fn check_contour(&self, payoff: &CoshPayoff<T>, r: T) -> Result<()> {
        let (lo, hi) = self.spec().uniform_domain().intervals[0];
        if !(r > lo && r < hi) {
            return Err(RatesError::Contour(format!(
                "R = {r} outside the moment domain ({lo}, {hi})"
            )));
        }
        let near = |p: T| (r - p).abs() <= T::c(1e-8) * (T::one() + p.abs());
        if near(T::zero()) {
            return Err(RatesError::Contour("R = 0 is a pole".into()));
        }
        for (_, m) in &payoff.terms {
            for p in [m.psi_plus, m.psi_minus] {
                if near(p) {
                    return Err(RatesError::Contour(format!("R = {r} hits the pole ψ = {p}")));
                }
            }
        }
        Ok(())
    }

    /// `E^{Q^T}[f(X_{t_e})]` by Fourier inversion along `Re = R`.
    pub fn fourier_expectation(
        &self,
        payoff: &CoshPayoff<T>,
        contour: Option<T>,
        opts: &PricingOptions<T>,
    ) -> Result<T> {
        if payoff.bounds.degenerate {
            return Ok(T::zero());
        }
        let r = contour.unwrap_or_else(|| self.default_contour(payoff));
        self.check_contour(payoff, r)?;
        let (k1, k2) = (payoff.bounds.kappa1, payoff.bounds.kappa2);
        // Beyond this the payoff spans too many orders of magnitude for the transform to
        // resolve in floating point.
        let spread = payoff
            .terms
            .iter()
            .map(|(_, m)| (m.psi_plus.abs() + m.psi_minus.abs()) * k1.abs().max(k2.abs()))
            .fold(T::zero(), T::max);
        if spread > T::c(40.0) {
            return Err(RatesError::Numerical(format!(
                "exercise window ({k1}, {k2}) too wide for a stable transform"
            )));
        }
        let te = payoff.expiry;
        let x0 = self.x0();
        let atom = self.spec().component(0).atom(te, x0).filter(|(p, _)| *p > T::zero());
        let mut base = T::zero();
        if let Some((p, loc)) = atom {
            base = p * payoff.value(loc);
            if p == T::one() {
                return Ok(base);
            }
        }
        let spec = self.spec();
        let mut failure = None;
        let mut integrand = |u: T| -> T {
            let z = Complex::new(r, u);
            let eval = || -> Result<T> {
                let (phi, psi) = spec.phi_psi_1d(te, z)?;
                let mut mgf = (phi + psi * x0).exp();
                if let Some((p, loc)) = atom {
                    mgf = mgf - (z * loc).exp() * p;
                }
                let w = -z;
                let mut acc = Complex::new(T::zero(), T::zero());
                for (c, m) in &payoff.terms {
                    acc = acc + h_from_terms(m, w, k1, k2)? * *c;
                }
                Ok((mgf * (-acc / w)).re)
            };
            match eval() {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    T::nan()
                }
            }
        };
        let v = integrate_semi_infinite(&mut integrand, T::zero(), &opts.tail);
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(base + v? / T::PI())
    }

    /// Floorlet on `F^{k+1}`: fixing at `T_k`, payment at `T_{k+1}`, unit notional.
    pub fn floorlet_price(&self, k: usize, strike: T, contour: Option<T>) -> Result<T> {
        self.floorlet_price_with(k, strike, contour, &PricingOptions::default())
    }

    pub fn floorlet_price_with(&self, k: usize, strike: T, contour: Option<T>, opts: &PricingOptions<T>) -> Result<T> {
        self.check_fixing(k)?;
        if !(self.u(k) > self.u(k + 1)) {
            return Err(RatesError::InvalidParameter(format!(
                "floorlet needs u_{k} > u_{}",
                k + 1
            )));
        }
        let payoff = self.floorlet_payoff(k, strike, opts.root_tol)?;
        Ok(self.p0t() * self.fourier_expectation(&payoff, contour, opts)?)
    }

    /// Caplet on `F^{k+1}` from the floorlet by put/call parity.
    pub fn caplet_price(&self, k: usize, strike: T, contour: Option<T>) -> Result<T> {
        self.caplet_price_with(k, strike, contour, &PricingOptions::default())
    }

    pub fn caplet_price_with(&self, k: usize, strike: T, contour: Option<T>, opts: &PricingOptions<T>) -> Result<T> {
        let flt = self.floorlet_price_with(k, strike, contour, opts)?;
        Ok(flt + self.caplet_parity_term(k, strike)?)
    }

    /// `Cpl - Flt = P(0,T_{k+1}) Δ_{k+1} (F^{k+1}(0) - K)`.
    pub fn caplet_parity_term(&self, k: usize, strike: T) -> Result<T> {
        let d = self.grid().accrual(k + 1);
        Ok(self.discount(k + 1)? * d * (self.forward_rate(k + 1)? - strike))
    }

    /// Put swaption with expiry `T_α` on the swap over `[T_α, T_β]` with fixed rate `K`.
    pub fn put_swaption_price(&self, alpha: usize, beta: usize, strike: T, contour: Option<T>) -> Result<T> {
        self.put_swaption_price_with(alpha, beta, strike, contour, &PricingOptions::default())
    }

    pub fn put_swaption_price_with(
        &self,
        alpha: usize,
        beta: usize,
        strike: T,
        contour: Option<T>,
        opts: &PricingOptions<T>,
    ) -> Result<T> {
        let payoff = self.put_swaption_payoff(alpha, beta, strike, opts.root_tol)?;
        Ok(self.p0t() * self.fourier_expectation(&payoff, contour, opts)?)
    }
}
