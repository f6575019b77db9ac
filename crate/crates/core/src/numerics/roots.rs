//! Bracketed root finding and golden-section maximisation.

use crate::error::{RatesError, Result};
use crate::real::Real;

/// Bisection for a sign change of `f` on `[a, b]`. Runs until the bracket cannot shrink
/// further or `|f| <= f_tol`, and returns the endpoint with the smaller residual.
pub fn bisect<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, f_tol: T) -> Result<T> {
    let (mut lo, mut hi) = (a, b);
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == T::zero() {
        return Ok(lo);
    }
    if fhi == T::zero() {
        return Ok(hi);
    }
    if (flo > T::zero()) == (fhi > T::zero()) {
        return Err(RatesError::Numerical(format!(
            "no sign change on [{a}, {b}]: f(a)={flo}, f(b)={fhi}"
        )));
    }
    let mut best = if flo.abs() < fhi.abs() { (lo, flo) } else { (hi, fhi) };
    for _ in 0..400 {
        let mid = lo + (hi - lo) / T::c(2.0);
        if !(mid > lo && mid < hi) {
            break;
        }
        let fm = f(mid);
        if fm.abs() < best.1.abs() {
            best = (mid, fm);
        }
        if fm == T::zero() || fm.abs() <= f_tol * T::c(1e-3) {
            return Ok(mid);
        }
        if (fm > T::zero()) == (flo > T::zero()) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(best.0)
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
pub fn golden_max<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, x_tol: T) -> (T, T) {
    let r = (T::c(5.0).sqrt() - T::one()) / T::c(2.0);
    let (mut a, mut b) = (a, b);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..300 {
        if (b - a).abs() <= x_tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two() {
        let r = bisect(|x: f64| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
        assert!(bisect(|x: f64| x * x + 1.0, 0.0, 2.0, 1e-15).is_err());
    }

    #[test]
    fn golden_parabola() {
        let (x, fx) = golden_max(|x: f64| -(x - 0.3) * (x - 0.3) + 1.0, -2.0, 5.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-8);
        assert!((fx - 1.0).abs() < 1e-15);
    }
}
