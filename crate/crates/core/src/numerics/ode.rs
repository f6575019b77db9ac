//! Dormand-Prince 5(4) with adaptive step size control.

use crate::error::{RatesError, Result};
use crate::real::Real;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_steps: usize,
}

impl<T: Real> Default for OdeOptions<T> {
    fn default() -> Self {
        OdeOptions {
            abs_tol: T::c(1e-10),
            rel_tol: T::c(1e-9),
            max_steps: 200_000,
        }
    }
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates the autonomous system `y' = rhs(y)` from 0 to `t_end`.
///
/// `rhs` may refuse a state (returning an error); the step is then halved. Repeated
/// refusal down to a vanishing step is reported as `OdeBlowup`.
pub fn dopri5<T: Real, F>(mut rhs: F, y0: &[T], t_end: T, opts: &OdeOptions<T>) -> Result<Vec<T>>
where
    F: FnMut(&[T], &mut [T]) -> Result<()>,
{
    let n = y0.len();
    let mut y = y0.to_vec();
    if t_end <= T::zero() {
        return Ok(y);
    }
    let mut k = vec![vec![T::zero(); n]; 7];
    let mut tmp = vec![T::zero(); n];
    let mut t = T::zero();
    let mut h = t_end.min(T::c(0.01) * (T::one() + t_end));
    let h_min = t_end * T::c(1e-14);
    rhs(&y, &mut k[0]).map_err(|e| RatesError::OdeBlowup(e.to_string()))?;
    for _ in 0..opts.max_steps {
        if t >= t_end {
            return Ok(y);
        }
        if t + h > t_end {
            h = t_end - t;
        }
        let mut ok = true;
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc = acc + h * T::c(A[s][j]) * kj[i];
                }
                tmp[i] = acc;
            }
            let (head, tail) = k.split_at_mut(s);
            let _ = head;
            if rhs(&tmp, &mut tail[0]).is_err() {
                ok = false;
                break;
            }
        }
        if !ok {
            h = h / T::c(4.0);
            if h < h_min {
                return Err(RatesError::OdeBlowup(format!(
                    "state left the admissible set near t = {t}"
                )));
            }
            continue;
        }
        let mut err = T::zero();
        let mut y_new = vec![T::zero(); n];
        for i in 0..n {
            let mut s5 = y[i];
            let mut s4 = y[i];
            for s in 0..7 {
                s5 = s5 + h * T::c(B5[s]) * k[s][i];
                s4 = s4 + h * T::c(B4[s]) * k[s][i];
            }
            let sc = opts.abs_tol + opts.rel_tol * y[i].abs().max(s5.abs());
            let e = (s5 - s4) / sc;
            err = err + e * e;
            y_new[i] = s5;
        }
        let err = (err / T::from_usize_(n.max(1))).sqrt();
        if !err.is_finite() {
            h = h / T::c(4.0);
            if h < h_min {
                return Err(RatesError::OdeBlowup(format!("non-finite state near t = {t}")));
            }
            continue;
        }
        if err <= T::one() {
            t = t + h;
            y = y_new;
            // FSAL: last stage is the derivative at the new state
            k.swap(0, 6);
        }
        let fac = if err == T::zero() {
            T::c(5.0)
        } else {
            (T::c(0.9) * err.powf(T::c(-0.2))).max(T::c(0.2)).min(T::c(5.0))
        };
        h = h * fac;
        if h < h_min && t < t_end {
            return Err(RatesError::OdeBlowup(format!("step size underflow near t = {t}")));
        }
    }
    Err(RatesError::OdeBlowup("step budget exhausted".into()))
}
