//! Nelder–Mead simplex search with restarts on an unconstrained parameterisation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// The objective fell below the target.
    Target,
    /// A restart from the best point did not improve it.
    Converged,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexOptions {
    pub budget: usize,
    pub initial_step: f64,
    /// Stop once the best value is at or below this.
    pub f_target: f64,
    /// Simplex collapse test on values, relative to `1 + |f_best|`.
    pub f_tol: f64,
    /// Simplex collapse test on the largest vertex distance to the best vertex.
    pub x_tol: f64,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            budget: 2000,
            initial_step: 0.1,
            f_target: 0.0,
            f_tol: 1e-15,
            x_tol: 1e-9,
            max_restarts: 4,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub stop: StopReason,
    /// Best value after each evaluation; nonincreasing.
    pub trace: Vec<f64>,
}

struct Counter<'a, F> {
    f: &'a mut F,
    evals: usize,
    budget: usize,
    best: (Vec<f64>, f64),
    trace: Vec<f64>,
}

impl<F: FnMut(&[f64]) -> f64> Counter<'_, F> {
    fn eval(&mut self, x: &[f64]) -> f64 {
        if self.exhausted() {
            return f64::INFINITY;
        }
        let mut v = (self.f)(x);
        if v.is_nan() {
            v = f64::INFINITY;
        }
        self.evals += 1;
        if v < self.best.1 {
            self.best = (x.to_vec(), v);
        }
        self.trace.push(self.best.1);
        v
    }

    fn exhausted(&self) -> bool {
        self.evals >= self.budget
    }
}

/// Minimises `f` from `x0`. Non-finite values reject a point. Each restart rebuilds the
/// simplex around the incumbent with randomly signed steps drawn from a seeded stream.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], opts: &SimplexOptions) -> SimplexResult {
    let n = x0.len();
    let mut c = Counter {
        f: &mut f,
        evals: 0,
        budget: opts.budget.max(1),
        best: (x0.to_vec(), f64::INFINITY),
        trace: vec![],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let f0 = c.eval(x0);
    if n == 0 || !f0.is_finite() {
        let stop = if f0 <= opts.f_target {
            StopReason::Target
        } else {
            StopReason::Converged
        };
        return SimplexResult {
            x: x0.to_vec(),
            value: f0,
            evaluations: c.evals,
            stop,
            trace: c.trace,
        };
    }
    let mut step = opts.initial_step;
    let mut stop = StopReason::Converged;
    for restart in 0..=opts.max_restarts {
        let start = c.best.clone();
        let mut simplex = vec![start.clone()];
        for i in 0..n {
            let mut x = start.0.clone();
            let sign = if restart == 0 || rng.gen::<bool>() { 1.0 } else { -1.0 };
            x[i] += sign * step;
            let v = c.eval(&x);
            simplex.push((x, v));
        }
        stop = run(&mut c, &mut simplex, opts);
        if stop != StopReason::Converged || restart > 0 && c.best.1 >= start.1 * (1.0 - 1e-12) {
            break;
        }
        step = (step * 0.5).max(opts.x_tol * 100.0);
    }
    let (x, value) = c.best.clone();
    if value <= opts.f_target {
        stop = StopReason::Target;
    }
    SimplexResult {
        x,
        value,
        evaluations: c.evals,
        stop,
        trace: c.trace,
    }
}

fn run<F: FnMut(&[f64]) -> f64>(c: &mut Counter<F>, s: &mut [(Vec<f64>, f64)], opts: &SimplexOptions) -> StopReason {
    let n = s.len() - 1;
    let lerp = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect() };
    loop {
        s.sort_by(|a, b| a.1.total_cmp(&b.1));
        if s[0].1 <= opts.f_target {
            return StopReason::Target;
        }
        if c.exhausted() {
            return StopReason::BudgetExhausted;
        }
        let spread = s[n].1 - s[0].1;
        let size = s[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&s[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread.is_finite() && spread <= opts.f_tol * (1.0 + s[0].1.abs()) && size <= opts.x_tol
            || size <= opts.x_tol * 1e-3
        {
            return StopReason::Converged;
        }
        let mut centroid = vec![0.0; s[0].0.len()];
        for (x, _) in &s[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let worst = s[n].clone();
        let xr = lerp(&centroid, &worst.0, -1.0);
        let fr = c.eval(&xr);
        if fr < s[0].1 {
            let xe = lerp(&centroid, &worst.0, -2.0);
            let fe = c.eval(&xe);
            s[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < s[n - 1].1 {
            s[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst.1 {
            let x = lerp(&centroid, &xr, 0.5);
            let v = c.eval(&x);
            (x, v)
        } else {
            let x = lerp(&centroid, &worst.0, 0.5);
            let v = c.eval(&x);
            (x, v)
        };
        if fc < fr.min(worst.1) {
            s[n] = (xc, fc);
            continue;
        }
        let best = s[0].0.clone();
        for v in s[1..].iter_mut() {
            if c.exhausted() {
                break;
            }
            let x = lerp(&best, &v.0, 0.5);
            let fx = c.eval(&x);
            *v = (x, fx);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = nelder_mead(
            f,
            &[-1.2, 1.0],
            &SimplexOptions {
                budget: 5000,
                ..Default::default()
            },
        );
        assert!(r.value < 1e-14, "{r:?}");
        assert!(r.trace.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(r.trace.len(), r.evaluations);
    }

    #[test]
    fn budget_and_rejection() {
        let f = |x: &[f64]| {
            if x[0] < 0.5 {
                f64::INFINITY
            } else {
                (x[0] - 2.0).powi(2) + x[1].powi(2)
            }
        };
        let r = nelder_mead(
            f,
            &[1.0, 1.0],
            &SimplexOptions {
                budget: 10,
                ..Default::default()
            },
        );
        assert_eq!(r.stop, StopReason::BudgetExhausted);
        assert!(r.evaluations <= 10);
        let r = nelder_mead(f, &[1.0, 1.0], &SimplexOptions::default());
        assert!((r.x[0] - 2.0).abs() < 1e-6 && r.value < 1e-12);
    }
}
