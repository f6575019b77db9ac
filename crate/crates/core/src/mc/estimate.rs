use rayon::prelude::*;

use super::simulate::{check_times, simulate_path, PathView, SimConfig};
use crate::affine::ProcessSpec;
use crate::error::Result;

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

impl McEstimate {
    /// Distance to `value` in standard errors.
    pub fn z_score(&self, value: f64) -> f64 {
        let d = (self.estimate - value).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.std_error
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(a: Moments, b: Moments) -> Moments {
        if a.n == 0.0 {
            return b;
        }
        if b.n == 0.0 {
            return a;
        }
        let n = a.n + b.n;
        let d = b.mean - a.mean;
        Moments {
            n,
            mean: a.mean + d * b.n / n,
            m2: a.m2 + b.m2 + d * d * a.n * b.n / n,
        }
    }
}

/// Pairwise reduction in a fixed order, independent of the thread count.
fn pairwise(v: &[Moments]) -> Moments {
    match v.len() {
        0 => Moments::default(),
        1 => v[0],
        n => Moments::merge(pairwise(&v[..n / 2]), pairwise(&v[n / 2..])),
    }
}

const BLOCK: usize = 1024;

/// Estimates several payoff functionals on the same paths.
pub fn mc_price_many<F>(
    spec: &ProcessSpec<f64>,
    times: &[f64],
    cfg: &SimConfig,
    n_outputs: usize,
    payoff: F,
) -> Result<Vec<McEstimate>>
where
    F: Fn(&PathView<'_>, &mut [f64]) + Sync,
{
    cfg.validate()?;
    check_times(spec, times)?;
    let dim = spec.dim();
    let n_blocks = cfg.n_paths.div_ceil(BLOCK);
    let blocks: Vec<Vec<Moments>> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = vec![Moments::default(); n_outputs];
            let mut state = vec![0.0; dim];
            let mut buf = vec![0.0; times.len() * dim];
            let mut out = vec![0.0; n_outputs];
            for p in b * BLOCK..((b + 1) * BLOCK).min(cfg.n_paths) {
                simulate_path(spec, times, cfg, p, &mut state, &mut buf);
                let view = PathView {
                    times,
                    dim,
                    values: &buf,
                };
                payoff(&view, &mut out);
                for (m, &x) in acc.iter_mut().zip(&out) {
                    m.push(x);
                }
            }
            acc
        })
        .collect();
    Ok((0..n_outputs)
        .map(|j| {
            let col: Vec<Moments> = blocks.iter().map(|b| b[j]).collect();
            let m = pairwise(&col);
            let var = if m.n > 1.0 { m.m2 / (m.n - 1.0) } else { 0.0 };
            McEstimate {
                estimate: m.mean,
                std_error: (var / m.n).sqrt(),
            }
        })
        .collect())
}

/// Estimates one payoff functional.
pub fn mc_price<F>(spec: &ProcessSpec<f64>, times: &[f64], cfg: &SimConfig, payoff: F) -> Result<McEstimate>
where
    F: Fn(&PathView<'_>) -> f64 + Sync,
{
    Ok(mc_price_many(spec, times, cfg, 1, |p, out| out[0] = payoff(p))?[0])
}
