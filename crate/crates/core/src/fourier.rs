//! Damped Fourier inversion for calls and puts on `e^Y` given the mgf of `Y`.

use num_complex::Complex;

use crate::error::{RatesError, Result};
use crate::numerics::{integrate_semi_infinite, TailOptions};
use crate::real::Real;

/// `E[(e^Y - K)^+]` for `R > 1`, `E[(K - e^Y)^+]` for `R < 0`.
pub fn fourier_option<T: Real, M>(mgf: M, strike: T, contour: T, opts: &TailOptions<T>) -> Result<T>
where
    M: Fn(Complex<T>) -> Result<Complex<T>>,
{
    if !(contour > T::one() || contour < T::zero()) {
        return Err(RatesError::Contour(format!(
            "damping {contour} must satisfy R > 1 (call) or R < 0 (put)"
        )));
    }
    if !(strike > T::zero()) {
        return Err(RatesError::InvalidParameter("strike of e^Y must be positive".into()));
    }
    mgf(Complex::new(contour, T::zero()))
        .map_err(|e| RatesError::Contour(format!("mgf not finite at R = {contour}: {e}")))?;
    let lk = strike.ln();
    let mut failed = None;
    let mut f = |u: T| {
        let z = Complex::new(contour, u);
        match mgf(z) {
            Ok(m) => (m * (-z * lk).exp() / (z * (z - T::one()))).re,
            Err(e) => {
                failed.get_or_insert(e);
                T::nan()
            }
        }
    };
    let v = integrate_semi_infinite(&mut f, T::zero(), opts);
    if let Some(e) = failed {
        return Err(e);
    }
    Ok(strike / T::PI() * v?)
}

/// First admissible damping from a list of candidates, probing the mgf on the real axis.
pub fn probe_contour<T: Real, M>(mgf: M, call: bool) -> Result<T>
where
    M: Fn(Complex<T>) -> Result<Complex<T>>,
{
    let cands: &[f64] = if call {
        &[2.0, 1.5, 1.25, 1.1, 1.05, 1.02]
    } else {
        &[-1.0, -0.5, -0.25, -0.1, -0.05, -0.02]
    };
    for &r in cands {
        let r = T::c(r);
        if let Ok(m) = mgf(Complex::new(r, T::zero())) {
            if m.re.is_finite() && m.re > T::zero() {
                return Ok(r);
            }
        }
    }
    Err(RatesError::Contour("no admissible damping found".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::black::{black_price, OptionKind};

    #[test]
    fn lognormal_matches_black() {
        let (f, v, t) = (1.05_f64, 0.2, 2.0);
        let mgf = |z: Complex<f64>| Ok((z * (f.ln() - 0.5 * v * v * t) + z * z * (0.5 * v * v * t)).exp());
        for &k in &[0.8, 1.0, 1.3] {
            let c = fourier_option(mgf, k, 1.5, &TailOptions::default()).unwrap();
            let p = fourier_option(mgf, k, -0.7, &TailOptions::default()).unwrap();
            let bc = black_price(OptionKind::Call, f, k, t, v, 1.0, 0.0);
            assert!((c - bc).abs() < 1e-12, "{c} {bc}");
            assert!((c - p - (f - k)).abs() < 1e-12);
        }
        assert!(fourier_option(mgf, 1.0, 0.5, &TailOptions::default()).is_err());
    }
}
