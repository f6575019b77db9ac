use num_complex::Complex;

use super::model::{axpy, cdot, cvec, InflationModel};
use crate::black::OptionKind;
use crate::error::{RatesError, Result};
use crate::fourier::{fourier_option, probe_contour};
use crate::numerics::TailOptions;
use crate::real::Real;

/// Damping and quadrature settings for the Fourier pricers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierOptions<T> {
    /// Damping `R`; probed from a candidate list when absent.
    pub contour: Option<T>,
    pub tail: TailOptions<T>,
}

impl<T: Real> Default for FourierOptions<T> {
    fn default() -> Self {
        FourierOptions {
            contour: None,
            tail: TailOptions::default(),
        }
    }
}

impl<T: Real> FourierOptions<T> {
    pub fn with_contour(contour: Option<T>) -> Self {
        FourierOptions {
            contour,
            ..Self::default()
        }
    }
}

fn re<T: Real>(w: &[Complex<T>]) -> Vec<T> {
    w.iter().map(|z| z.re).collect()
}

impl<T: Real> InflationModel<T> {
    fn in_domain(&self, w: &[Complex<T>], what: &str) -> Result<()> {
        if self.spec().uniform_domain().contains(&re(w)) {
            Ok(())
        } else {
            Err(RatesError::Domain(format!("{what} outside the moment domain")))
        }
    }

    fn check_times(&self, times: &[T]) -> Result<()> {
        let slack = T::c(1e-12) * self.horizon();
        if times[0] < T::zero() || times.windows(2).any(|w| w[0] > w[1] + slack) {
            return Err(RatesError::InvalidParameter(
                "times must satisfy 0 ≤ s ≤ r ≤ t ≤ T_k".into(),
            ));
        }
        Ok(())
    }

    /// `E^{Q^{T_k}}[e^{w·X_r} | X_s = x]` for `s ≤ r ≤ T_k`.
    pub fn forward_measure_mgf(&self, k: usize, w: &[Complex<T>], s: T, r: T, x: &[T]) -> Result<Complex<T>> {
        self.check_index(k, 1)?;
        self.check_times(&[s, r, self.date(k)])?;
        let (_, a) = self.phi_psi_real(self.horizon() - r, self.u(k))?;
        let a = cvec(&a);
        let aw = axpy(&a, w, Complex::new(T::one(), T::zero()));
        self.in_domain(&aw, "ψ_{T-r}(u_k) + w")?;
        let p1 = self.phi_psi(r - s, &aw)?;
        let p0 = self.phi_psi(r - s, &a)?;
        let dpsi: Vec<Complex<T>> = p1.psi.iter().zip(&p0.psi).map(|(x, y)| x - y).collect();
        Ok((p1.phi - p0.phi + cdot(&dpsi, x)).exp())
    }

    /// Forward CPI `𝕀(t,T_k) = M_t^{v_k}/M_t^{u_k}` at state `x`.
    pub fn forward_cpi(&self, t: T, k: usize, x: &[T]) -> Result<T> {
        self.check_index(k, 1)?;
        self.need_inflation()?;
        self.check_times(&[t, self.date(k)])?;
        let (a, b) = self.ab(t, self.v(k), self.u(k))?;
        Ok((a + b.iter().zip(x).fold(T::zero(), |s, (p, &xi)| s + *p * xi)).exp())
    }

    /// `𝕀(0,T_k)` at the initial state.
    pub fn forward_cpi0(&self, k: usize) -> Result<T> {
        self.forward_cpi(T::zero(), k, &self.x0())
    }

    /// `E^{Q^{T_k}}[I(T_k)^z | X_s = x]` in the semiflow-simplified form.
    pub fn cpi_log_mgf(&self, k: usize, z: Complex<T>, s: T, x: &[T]) -> Result<Complex<T>> {
        self.check_index(k, 1)?;
        self.need_inflation()?;
        let tk = self.date(k);
        self.check_times(&[s, tk])?;
        let tau = self.horizon() - tk;
        let (pv, sv) = self.phi_psi_real(tau, self.v(k))?;
        let (pu, su) = self.phi_psi_real(tau, self.u(k))?;
        let one = Complex::new(T::one(), T::zero());
        let b: Vec<Complex<T>> = sv.iter().zip(&su).map(|(&a, &c)| z * a + (one - z) * c).collect();
        self.in_domain(&b, "zψ(v_k) + (1-z)ψ(u_k)")?;
        let p = self.phi_psi(tk - s, &b)?;
        let lm = self.log_martingale(s, self.u(k), x)?;
        Ok((z * pv + (one - z) * pu + p.phi + cdot(&p.psi, x) - lm).exp())
    }

    /// Same quantity composed directly from the forward-measure transform.
    pub fn cpi_log_mgf_composed(&self, k: usize, z: Complex<T>, s: T, x: &[T]) -> Result<Complex<T>> {
        let (a, b) = self.cpi_loadings(k)?;
        let w: Vec<Complex<T>> = b.iter().map(|&bi| z * bi).collect();
        Ok((z * a).exp() * self.forward_measure_mgf(k, &w, s, self.date(k), x)?)
    }

    /// `E^{Q^{T_k}}[e^{u·X_r + w·X_t} | X_s = x]` for `s ≤ r ≤ t ≤ T_k`.
    #[allow(clippy::too_many_arguments)]
    pub fn double_time_mgf(
        &self,
        k: usize,
        u: &[Complex<T>],
        w: &[Complex<T>],
        r: T,
        t: T,
        s: T,
        x: &[T],
    ) -> Result<Complex<T>> {
        self.check_index(k, 1)?;
        self.check_times(&[s, r, t, self.date(k)])?;
        let one = Complex::new(T::one(), T::zero());
        let (_, a) = self.phi_psi_real(self.horizon() - t, self.u(k))?;
        let a = cvec(&a);
        let aw = axpy(&a, w, one);
        self.in_domain(&aw, "first condition: ψ_{T-t}(u_k) + w")?;
        let p1 = self.phi_psi(t - r, &aw)?;
        let cu = axpy(&p1.psi, u, one);
        self.in_domain(&cu, "second condition: ψ_{t-r}(ψ_{T-t}(u_k) + w) + u")?;
        let p2 = self.phi_psi(r - s, &cu)?;
        let base = self.phi_psi(t - s, &a)?;
        let (_, full) = self.phi_psi_real(self.horizon() - s, self.u(k))?;
        let dpsi: Vec<Complex<T>> = p2.psi.iter().zip(&full).map(|(p, &f)| p - f).collect();
        Ok((p1.phi + p2.phi - base.phi + cdot(&dpsi, x)).exp())
    }

    /// Transform of `Y = log(I(T_k)/I(T_{k-j}))` under `Q^{T_k}`, for `s ≤ T_{k-j}`.
    pub fn yoy_mgf(&self, k: usize, j: usize, z: Complex<T>, s: T, x: &[T]) -> Result<Complex<T>> {
        if j == 0 || j > k {
            return Err(RatesError::InvalidParameter(format!(
                "need 1 ≤ j ≤ k, got j={j}, k={k}"
            )));
        }
        self.check_index(k, 1)?;
        let kj = k - j;
        let (ak, bk) = self.cpi_loadings(k)?;
        let (aj, bj) = self.cpi_loadings(kj)?;
        let u: Vec<Complex<T>> = bj.iter().map(|&b| -z * b).collect();
        let w: Vec<Complex<T>> = bk.iter().map(|&b| z * b).collect();
        let core = self.double_time_mgf(k, &u, &w, self.date(kj), self.date(k), s, x)?;
        Ok((z * (ak - aj)).exp() * core)
    }

    /// Forward inflation rate `F_I(t, T_{k-j}, T_k)` from its exponential-affine closed form.
    pub fn forward_inflation_rate(&self, t: T, kj: usize, k: usize, x: &[T]) -> Result<T> {
        if kj >= k {
            return Err(RatesError::InvalidParameter(format!("need T_{kj} < T_{k}")));
        }
        self.check_index(k, 1)?;
        self.need_inflation()?;
        let span = self.date(k) - self.date(kj);
        if kj == 0 {
            return Ok((self.forward_cpi(t, k, x)? - T::one()) / span);
        }
        let tj = self.date(kj);
        self.check_times(&[t, tj])?;
        let tau = self.horizon() - tj;
        let (pv, sv) = self.phi_psi_real(tau, self.v(k))?;
        let (aj, bj) = self.cpi_loadings(kj)?;
        let w: Vec<T> = sv.iter().zip(&bj).map(|(a, b)| *a - *b).collect();
        self.in_domain(&cvec(&w), "ψ_{T-T_{k-j}}(v_k) - B_I^{k-j}")?;
        let (pw, sw) = self.phi_psi_real(tj - t, &w)?;
        let (pu, su) = self.phi_psi_real(self.horizon() - t, self.u(k))?;
        let lin = sw
            .iter()
            .zip(&su)
            .zip(x)
            .fold(T::zero(), |s, ((a, b), &xi)| s + (*a - *b) * xi);
        Ok(((pv - aj + pw - pu + lin).exp() - T::one()) / span)
    }

    /// `F_I(0, T_{k-j}, T_k)` at the initial state.
    pub fn forward_inflation_rate0(&self, kj: usize, k: usize) -> Result<T> {
        self.forward_inflation_rate(T::zero(), kj, k, &self.x0())
    }

    fn option_on_exp<M>(&self, mgf: M, kind: OptionKind, strike: T, opts: &FourierOptions<T>) -> Result<T>
    where
        M: Fn(Complex<T>) -> Result<Complex<T>>,
    {
        let call = kind == OptionKind::Call;
        let r = match opts.contour {
            Some(r) => r,
            None => probe_contour(&mgf, call)?,
        };
        if call != (r > T::one()) {
            return Err(RatesError::Contour(format!(
                "damping {r} does not match the option type"
            )));
        }
        fourier_option(&mgf, strike, r, &opts.tail)
    }

    /// CPI option with payoff `(I(T_k) - K)^+` (call) or `(K - I(T_k))^+` (put) paid at `T_k`.
    pub fn cpi_option_price(&self, kind: OptionKind, k: usize, strike: T, contour: Option<T>) -> Result<T> {
        self.cpi_option_price_with(kind, k, strike, &FourierOptions::with_contour(contour))
    }

    pub fn cpi_option_price_with(&self, kind: OptionKind, k: usize, strike: T, opts: &FourierOptions<T>) -> Result<T> {
        let x0 = self.x0();
        let mgf = |z: Complex<T>| self.cpi_log_mgf(k, z, T::zero(), &x0);
        Ok(self.discount(k)? * self.option_on_exp(mgf, kind, strike, opts)?)
    }

    pub fn cpi_call_price(&self, k: usize, strike: T, contour: Option<T>) -> Result<T> {
        self.cpi_option_price(OptionKind::Call, k, strike, contour)
    }

    /// Caplet (call) or floorlet (put) on `F^k`, fixing at `T_{k-1}` and paid at `T_k`, `k ≥ 2`.
    pub fn nominal_option_price(&self, kind: OptionKind, k: usize, strike: T, contour: Option<T>) -> Result<T> {
        self.nominal_option_price_with(kind, k, strike, &FourierOptions::with_contour(contour))
    }

    pub fn nominal_option_price_with(
        &self,
        kind: OptionKind,
        k: usize,
        strike: T,
        opts: &FourierOptions<T>,
    ) -> Result<T> {
        self.check_index(k, 2)?;
        let fix = self.date(k - 1);
        let (a, b) = self.ab(fix, self.u(k - 1), self.u(k))?;
        let x0 = self.x0();
        let mgf = |z: Complex<T>| {
            let w: Vec<Complex<T>> = b.iter().map(|&bi| z * bi).collect();
            Ok((z * a).exp() * self.forward_measure_mgf(k, &w, T::zero(), fix, &x0)?)
        };
        let kt = T::one() + self.grid().accrual(k) * strike;
        if !(kt > T::zero()) {
            return Err(RatesError::InvalidParameter("1 + ΔK must be positive".into()));
        }
        Ok(self.discount(k)? * self.option_on_exp(mgf, kind, kt, opts)?)
    }

    pub fn nominal_caplet_price(&self, k: usize, strike: T, contour: Option<T>) -> Result<T> {
        self.nominal_option_price(OptionKind::Call, k, strike, contour)
    }

    /// Inflation caplet (call) or floorlet (put) on `F_I(T_k, T_{k-j}, T_k)` paid at `T_k`.
    pub fn inflation_option_price(
        &self,
        kind: OptionKind,
        kj: usize,
        k: usize,
        strike: T,
        contour: Option<T>,
    ) -> Result<T> {
        self.inflation_option_price_with(kind, kj, k, strike, &FourierOptions::with_contour(contour))
    }

    pub fn inflation_option_price_with(
        &self,
        kind: OptionKind,
        kj: usize,
        k: usize,
        strike: T,
        opts: &FourierOptions<T>,
    ) -> Result<T> {
        if kj >= k {
            return Err(RatesError::InvalidParameter(format!("need T_{kj} < T_{k}")));
        }
        let span = self.date(k) - self.date(kj);
        let kt = T::one() + span * strike;
        if !(kt > T::zero()) {
            return Err(RatesError::InvalidParameter(
                "1 + (T_k - T_{k-j})K must be positive".into(),
            ));
        }
        let x0 = self.x0();
        let mgf = |z: Complex<T>| self.yoy_mgf(k, k - kj, z, T::zero(), &x0);
        Ok(self.discount(k)? * self.option_on_exp(mgf, kind, kt, opts)?)
    }

    pub fn inflation_caplet_price(&self, kj: usize, k: usize, strike: T, contour: Option<T>) -> Result<T> {
        self.inflation_option_price(OptionKind::Call, kj, k, strike, contour)
    }

    pub fn inflation_floorlet_price(&self, kj: usize, k: usize, strike: T, contour: Option<T>) -> Result<T> {
        self.inflation_option_price(OptionKind::Put, kj, k, strike, contour)
    }

    /// `Cap - Floor = P(0,T_k)(T_k - T_{k-j})(F_I(0) - K)`.
    pub fn inflation_parity_term(&self, kj: usize, k: usize, strike: T) -> Result<T> {
        let span = self.date(k) - self.date(kj);
        Ok(self.discount(k)? * span * (self.forward_inflation_rate0(kj, k)? - strike))
    }

    fn year_index(&self, years: usize) -> Result<usize> {
        if years == 0 || 2 * years > self.n() {
            return Err(RatesError::InvalidParameter(format!(
                "maturity {years}y outside 1..={}",
                self.years()
            )));
        }
        Ok(2 * years)
    }

    /// Par rate `K` of the zero-coupon inflation swap: `(1+K)^M = 𝕀(0,T)`.
    pub fn zciis_rate(&self, years: usize) -> Result<T> {
        let k = self.year_index(years)?;
        Ok(self.forward_cpi0(k)?.powf(T::one() / T::from_usize_(years)) - T::one())
    }

    /// Value of a payer zero-coupon inflation swap with fixed rate `K`.
    pub fn zciis_value(&self, years: usize, rate: T) -> Result<T> {
        let k = self.year_index(years)?;
        Ok(self.discount(k)? * (self.forward_cpi0(k)? - (T::one() + rate).powi(years as i32)))
    }

    /// Par rate of the year-on-year inflation swap over `years` annual periods.
    pub fn yyiis_rate(&self, years: usize) -> Result<T> {
        self.year_index(years)?;
        let (mut num, mut den) = (T::zero(), T::zero());
        for y in 1..=years {
            let p = self.discount(2 * y)?;
            num = num + p * self.forward_inflation_rate0(2 * y - 2, 2 * y)?;
            den = den + p;
        }
        Ok(num / den)
    }

    /// Value of a payer year-on-year swap with fixed rate `K`.
    pub fn yyiis_value(&self, years: usize, rate: T) -> Result<T> {
        self.year_index(years)?;
        let mut v = T::zero();
        for y in 1..=years {
            v = v + self.discount(2 * y)? * (self.forward_inflation_rate0(2 * y - 2, 2 * y)? - rate);
        }
        Ok(v)
    }
}
