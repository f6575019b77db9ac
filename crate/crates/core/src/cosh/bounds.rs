//! Maximum and root location for unimodal trigger functions.

use crate::error::{RatesError, Result};
use crate::numerics::{bisect, golden_max};
use crate::real::Real;

/// Exercise region `(κ₁, κ₂)` around the maximiser `ξ`; degenerate when `max g ≤ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExerciseBounds<T> {
    pub kappa1: T,
    pub kappa2: T,
    pub xi: T,
    pub degenerate: bool,
}

const REACH: f64 = 1e6;

/// Maximiser of a unimodal `g`, bracketed by walking uphill from `start` with doubling steps.
pub fn locate_max<T: Real, G: Fn(T) -> T>(g: &G, start: T) -> Result<(T, T)> {
    let mut x = start;
    let mut gx = g(x);
    let one = T::one();
    let (gl, gr) = (g(x - one), g(x + one));
    let dir = if gr > gx {
        one
    } else if gl > gx {
        -one
    } else {
        let (xi, gxi) = golden_max(g, x - one, x + one, T::c(1e-12) * (one + x.abs()));
        return Ok((xi, gxi));
    };
    let mut step = one;
    let mut prev = x - dir * step;
    loop {
        let next = x + dir * step;
        let gn = g(next);
        if !(gn > gx) {
            let (a, b) = if prev < next { (prev, next) } else { (next, prev) };
            let (xi, gxi) = golden_max(g, a, b, T::c(1e-12) * (one + x.abs()));
            return Ok((xi, gxi));
        }
        prev = x;
        x = next;
        gx = gn;
        step = step + step;
        if x.abs() > T::c(REACH) {
            return Err(RatesError::NotUnimodal("no interior maximum within reach".into()));
        }
    }
}

fn side_root<T: Real, G: Fn(T) -> T>(g: &G, xi: T, gxi: T, dir: T, tol: T) -> Result<T> {
    let mut step = T::one();
    let mut a = xi;
    let mut ga = gxi;
    loop {
        let b = xi + dir * step;
        let gb = g(b);
        if gb > ga + T::c(1e-12) * (T::one() + ga.abs()) {
            return Err(RatesError::NotUnimodal(format!(
                "trigger increases away from its maximum near {b}"
            )));
        }
        if !(gb > T::zero()) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            return bisect(g, lo, hi, tol);
        }
        a = b;
        ga = gb;
        step = step + step;
        if step > T::c(REACH) {
            return Err(RatesError::NotUnimodal("payoff region unbounded within reach".into()));
        }
    }
}

/// Roots of a unimodal trigger `g` on both sides of its maximum.
pub fn find_exercise_bounds<T: Real, G: Fn(T) -> T>(g: G, start: T, tol: T) -> Result<ExerciseBounds<T>> {
    let (xi, gxi) = locate_max(&g, start)?;
    if !(gxi > T::zero()) {
        return Ok(ExerciseBounds {
            kappa1: xi,
            kappa2: xi,
            xi,
            degenerate: true,
        });
    }
    let kappa1 = side_root(&g, xi, gxi, -T::one(), tol)?;
    let kappa2 = side_root(&g, xi, gxi, T::one(), tol)?;
    Ok(ExerciseBounds {
        kappa1,
        kappa2,
        xi,
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_function() {
        let g = |x: f64| 1.0 - (x - 3.0) * (x - 3.0);
        let b = find_exercise_bounds(g, 0.0, 1e-12).unwrap();
        assert!((b.kappa1 - 2.0).abs() < 1e-12 && (b.kappa2 - 4.0).abs() < 1e-12);
        let d = find_exercise_bounds(|x: f64| -1.0 - x * x, 5.0, 1e-12).unwrap();
        assert!(d.degenerate && d.kappa1 == d.kappa2);
    }

    #[test]
    fn bimodal_is_rejected() {
        let g = |x: f64| (-x * x).exp() + 0.2 * x * x;
        assert!(matches!(
            find_exercise_bounds(g, 0.0, 1e-12),
            Err(RatesError::NotUnimodal(_))
        ));
    }
}
