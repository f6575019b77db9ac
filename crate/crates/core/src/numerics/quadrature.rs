//! Adaptive Gauss-Kronrod (7/15) quadrature on finite and semi-infinite ranges.

use crate::error::{RatesError, Result};
use crate::real::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod rule on [a, b]. Returns (estimate, error estimate, max |f| at nodes).
pub fn gauss_kronrod<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T, T) {
    let half = T::c(0.5);
    let c = half * (a + b);
    let h = half * (b - a);
    let fc = f(c);
    let mut k = fc * T::c(WGK[7]);
    let mut g = fc * T::c(WG[3]);
    let mut fmax = fc.abs();
    for j in 0..7 {
        let dx = h * T::c(XGK[j]);
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fmax = fmax.max(f1.abs()).max(f2.abs());
        k = k + (f1 + f2) * T::c(WGK[j]);
        if j % 2 == 1 {
            g = g + (f1 + f2) * T::c(WG[j / 2]);
        }
    }
    (k * h, ((k - g) * h).abs(), fmax)
}

/// Adaptive bisection of Kronrod panels until the summed error estimate
/// drops below `max(abs_tol, rel_tol * |I|)`.
pub fn integrate_adaptive<T: Real, F: FnMut(T) -> T>(
    f: &mut F,
    a: T,
    b: T,
    rel_tol: T,
    abs_tol: T,
    max_panels: usize,
) -> Result<(T, T)> {
    let (i0, e0, m0) = gauss_kronrod(f, a, b);
    let mut panels = vec![(a, b, i0, e0)];
    let mut total = i0;
    let mut err = e0;
    let mut fmax = m0;
    while err > abs_tol.max(rel_tol * total.abs()) && panels.len() < max_panels {
        let (idx, _) = panels
            .iter()
            .enumerate()
            .fold((0, -T::one()), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc });
        let (pa, pb, pi, pe) = panels.swap_remove(idx);
        let mid = T::c(0.5) * (pa + pb);
        if !(mid > pa && mid < pb) {
            panels.push((pa, pb, pi, pe));
            break;
        }
        let (i1, e1, m1) = gauss_kronrod(f, pa, mid);
        let (i2, e2, m2) = gauss_kronrod(f, mid, pb);
        fmax = fmax.max(m1).max(m2);
        total = total - pi + i1 + i2;
        err = err - pe + e1 + e2;
        panels.push((pa, mid, i1, e1));
        panels.push((mid, pb, i2, e2));
    }
    if !total.is_finite() || !fmax.is_finite() {
        return Err(RatesError::Numerical("non-finite integrand".into()));
    }
    // re-sum to limit drift from the running updates
    let total = panels.iter().fold(T::zero(), |s, p| s + p.2);
    Ok((total, fmax))
}

/// Controls for integrals over `[a, ∞)` split into geometrically growing panels.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TailOptions<T> {
    pub first_width: T,
    pub rel_tol: T,
    pub abs_tol: T,
    pub tail_tol: T,
    pub upper_cap: T,
    pub max_panels_per_segment: usize,
}

impl<T: Real> Default for TailOptions<T> {
    fn default() -> Self {
        TailOptions {
            first_width: T::one(),
            rel_tol: T::c(1e-12),
            abs_tol: T::c(1e-15),
            tail_tol: T::c(1e-10),
            upper_cap: T::c(1e6),
            max_panels_per_segment: 4000,
        }
    }
}

/// Integrates `f` over `[a, ∞)`. Panels double in width; integration stops once two
/// consecutive panels contribute less than `tail_tol · |I|` while their envelope
/// `max|f|·width` is below `√tail_tol · |I|` (oscillating tails cancel well beyond the
/// envelope), or the cap is reached.
pub fn integrate_semi_infinite<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, opts: &TailOptions<T>) -> Result<T> {
    let mut lo = a;
    let mut width = opts.first_width;
    let mut total = T::zero();
    let mut quiet = 0;
    while lo < opts.upper_cap {
        let hi = lo + width;
        let local_abs = opts.abs_tol.max(opts.rel_tol * total.abs() * T::c(0.1));
        let (part, fmax) = integrate_adaptive(f, lo, hi, opts.rel_tol, local_abs, opts.max_panels_per_segment)?;
        total = total + part;
        let scale = total.abs().max(opts.abs_tol);
        let small = part.abs() <= opts.tail_tol * scale && fmax * width <= opts.tail_tol.sqrt() * scale;
        if small || fmax * width <= opts.abs_tol {
            quiet += 1;
            if quiet >= 2 {
                break;
            }
        } else {
            quiet = 0;
        }
        lo = hi;
        width = width + width;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_exponential() {
        let (v, _) = integrate_adaptive(&mut |x: f64| x * x, 0.0, 3.0, 1e-14, 1e-15, 100).unwrap();
        assert!((v - 9.0).abs() < 1e-13);
        let v = integrate_semi_infinite(&mut |x: f64| (-x).exp(), 0.0, &TailOptions::default()).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_tail() {
        // ∫_0^∞ cos(x) e^{-x} dx = 1/2
        let v = integrate_semi_infinite(&mut |x: f64| x.cos() * (-x).exp(), 0.0, &TailOptions::default()).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        // ∫_0^∞ 1/(1+x²) dx = π/2, slow algebraic decay
        let opts = TailOptions {
            upper_cap: 1e13,
            ..TailOptions::default()
        };
        let v = integrate_semi_infinite(&mut |x: f64| 1.0 / (1.0 + x * x), 0.0, &opts).unwrap();
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    }
}
