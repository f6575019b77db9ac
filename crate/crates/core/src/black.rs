//! Black (optionally shifted) forward pricing and implied volatility.

use crate::error::{RatesError, Result};
use crate::numerics::{bisect, norm_cdf};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptionKind {
    Call,
    Put,
}

/// Discounted Black price `annuity · E[(F_T - K)^+]` (or the put), with `F + shift` lognormal.
pub fn black_price<T: Real>(kind: OptionKind, forward: T, strike: T, expiry: T, vol: T, annuity: T, shift: T) -> T {
    let f = forward + shift;
    let k = strike + shift;
    let sd = vol * expiry.sqrt();
    let intrinsic = match kind {
        OptionKind::Call => (f - k).max(T::zero()),
        OptionKind::Put => (k - f).max(T::zero()),
    };
    if sd <= T::zero() {
        return annuity * intrinsic;
    }
    let d1 = ((f / k).ln() + sd * sd / T::c(2.0)) / sd;
    let d2 = d1 - sd;
    annuity
        * match kind {
            OptionKind::Call => f * norm_cdf(d1) - k * norm_cdf(d2),
            OptionKind::Put => k * norm_cdf(-d2) - f * norm_cdf(-d1),
        }
}

/// Implied Black volatility by bracketed bisection on the volatility.
pub fn black_implied_vol<T: Real>(
    kind: OptionKind,
    price: T,
    forward: T,
    strike: T,
    expiry: T,
    annuity: T,
    shift: T,
) -> Result<T> {
    let f = forward + shift;
    let k = strike + shift;
    if !(f > T::zero() && k > T::zero() && annuity > T::zero() && expiry > T::zero()) {
        return Err(RatesError::InvalidParameter(
            "shifted forward, strike, annuity and expiry must be positive".into(),
        ));
    }
    let (intrinsic, upper) = match kind {
        OptionKind::Call => ((f - k).max(T::zero()) * annuity, f * annuity),
        OptionKind::Put => ((k - f).max(T::zero()) * annuity, k * annuity),
    };
    let slack = T::c(1e-14) * annuity * (T::one() + f.max(k));
    if !price.is_finite() || price < intrinsic - slack || price >= upper {
        return Err(RatesError::OutOfBounds(format!(
            "price {price} outside [{intrinsic}, {upper}) for forward {forward}, strike {strike}"
        )));
    }
    if price <= intrinsic {
        return Ok(T::zero());
    }
    let g = |v: T| black_price(kind, forward, strike, expiry, v, annuity, shift) - price;
    let mut hi = T::one();
    while g(hi) < T::zero() {
        hi = hi + hi;
        if hi > T::c(1e4) {
            return Err(RatesError::OutOfBounds(format!(
                "no volatility reproduces price {price}"
            )));
        }
    }
    bisect(g, T::zero(), hi, T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_parity() {
        for &(f, k, t, v) in &[
            (0.035_f64, 0.02, 1.0, 0.3),
            (0.035, 0.07, 4.5, 0.15),
            (0.01, 0.03, 0.5, 0.8),
        ] {
            let p = black_price(OptionKind::Call, f, k, t, v, 0.9, 0.0);
            let back = black_implied_vol(OptionKind::Call, p, f, k, t, 0.9, 0.0).unwrap();
            assert!((back - v).abs() < 1e-8, "{back} vs {v}");
            let q = black_price(OptionKind::Put, f, k, t, v, 0.9, 0.0);
            assert!((p - q - 0.9 * (f - k)).abs() < 1e-15);
        }
        assert_eq!(
            black_implied_vol(OptionKind::Call, 0.9 * 0.015, 0.035, 0.02, 1.0, 0.9, 0.0).unwrap(),
            0.0
        );
        assert!(matches!(
            black_implied_vol(OptionKind::Call, 0.001, 0.035, 0.02, 1.0, 0.9, 0.0),
            Err(RatesError::OutOfBounds(_))
        ));
    }

    #[test]
    fn shifted_negative_forward() {
        let p = black_price(OptionKind::Put, -0.01_f64, 0.0, 2.0, 0.02, 1.0, 1.0);
        let v = black_implied_vol(OptionKind::Put, p, -0.01, 0.0, 2.0, 1.0, 1.0).unwrap();
        assert!((v - 0.02).abs() < 1e-9);
    }
}
