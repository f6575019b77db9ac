use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Gamma, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::affine::{Component, ProcessSpec};
use crate::error::{RatesError, Result};

/// Transition scheme for CIR-type components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CirScheme {
    /// Noncentral chi-square transitions with exactly timed jumps.
    Exact,
    /// Full-truncation Euler with `steps_per_year` substeps and a Poisson jump overlay.
    FullTruncationEuler,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_paths: usize,
    pub steps_per_year: usize,
    pub seed: u64,
    pub cir_scheme: CirScheme,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n_paths: 1_000_000,
            steps_per_year: 64,
            seed: 42,
            cir_scheme: CirScheme::FullTruncationEuler,
        }
    }
}

impl SimConfig {
    pub fn with_paths(n_paths: usize, seed: u64) -> Self {
        SimConfig {
            n_paths,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 || self.steps_per_year == 0 {
            return Err(RatesError::InvalidParameter(
                "n_paths and steps_per_year must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// One path: states at the requested times, row-major `[time][component]`.
#[derive(Debug, Clone, Copy)]
pub struct PathView<'a> {
    pub times: &'a [f64],
    pub dim: usize,
    pub values: &'a [f64],
}

impl<'a> PathView<'a> {
    pub fn state(&self, i: usize) -> &'a [f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }
}

/// Full path array `[path][time][component]`.
#[derive(Debug, Clone)]
pub struct PathSet {
    pub times: Vec<f64>,
    pub dim: usize,
    pub n_paths: usize,
    pub values: Vec<f64>,
}

impl PathSet {
    pub fn path(&self, p: usize) -> PathView<'_> {
        let stride = self.times.len() * self.dim;
        PathView {
            times: &self.times,
            dim: self.dim,
            values: &self.values[p * stride..(p + 1) * stride],
        }
    }

    pub fn value(&self, p: usize, i: usize, c: usize) -> f64 {
        self.values[(p * self.times.len() + i) * self.dim + c]
    }
}

pub(crate) fn path_rng(seed: u64, path: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path as u64);
    rng
}

pub(crate) fn check_times(spec: &ProcessSpec<f64>, times: &[f64]) -> Result<()> {
    let mut prev = 0.0;
    for &t in times {
        if !(t >= prev) || t > spec.horizon() * (1.0 + 1e-12) {
            return Err(RatesError::InvalidParameter(
                "simulation times must be sorted within [0, horizon]".into(),
            ));
        }
        prev = t;
    }
    Ok(())
}

fn poisson<R: Rng>(rng: &mut R, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map(|d| d.sample(rng) as u64).unwrap_or(0)
}

fn exp_sample<R: Rng>(rng: &mut R, rate: f64) -> f64 {
    Exp::new(rate).map(|d| d.sample(rng)).unwrap_or(f64::INFINITY)
}

fn normal<R: Rng>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Exact CIR transition over `dt` for `dX = -λ(X-θ)dt + 2η√X dW`.
fn cir_exact<R: Rng>(rng: &mut R, x: f64, lambda: f64, theta: f64, eta: f64, dt: f64) -> f64 {
    if dt <= 0.0 {
        return x;
    }
    let c = eta * eta * (-(-lambda * dt).exp_m1()) / lambda;
    let d = lambda * theta / (eta * eta);
    let nc = x * (-lambda * dt).exp() / c;
    let n = poisson(rng, nc / 2.0);
    let shape = d / 2.0 + n as f64;
    if shape <= 0.0 {
        return 0.0;
    }
    c * Gamma::new(shape, 2.0).map(|g| g.sample(rng)).unwrap_or(0.0)
}

fn cir_jump_exact<R: Rng>(rng: &mut R, x: f64, c: &Component<f64>, dt: f64) -> f64 {
    let (lambda, theta, eta, alpha, beta) = match *c {
        Component::CirJump {
            lambda,
            theta,
            eta,
            alpha,
            beta,
            ..
        } => (lambda, theta, eta, alpha, beta),
        Component::Cir { lambda, theta, eta, .. } => (lambda, theta, eta, 1.0, 0.0),
        _ => unreachable!(),
    };
    let rate = lambda * beta;
    let mut x = x;
    let mut left = dt;
    loop {
        let wait = if rate > 0.0 {
            exp_sample(rng, rate)
        } else {
            f64::INFINITY
        };
        if wait >= left {
            return cir_exact(rng, x, lambda, theta, eta, left);
        }
        x = cir_exact(rng, x, lambda, theta, eta, wait) + exp_sample(rng, alpha);
        left -= wait;
    }
}

fn cir_euler<R: Rng>(rng: &mut R, x: f64, c: &Component<f64>, dt: f64, steps_per_year: usize) -> f64 {
    let (lambda, theta, eta, alpha, beta) = match *c {
        Component::CirJump {
            lambda,
            theta,
            eta,
            alpha,
            beta,
            ..
        } => (lambda, theta, eta, alpha, beta),
        Component::Cir { lambda, theta, eta, .. } => (lambda, theta, eta, 1.0, 0.0),
        _ => unreachable!(),
    };
    let n = ((dt * steps_per_year as f64).ceil() as usize).max(1);
    let h = dt / n as f64;
    let mut x = x;
    for _ in 0..n {
        let xp = x.max(0.0);
        x += lambda * (theta - xp) * h + 2.0 * eta * (xp * h).sqrt() * normal(rng);
        for _ in 0..poisson(rng, lambda * beta * h) {
            x += exp_sample(rng, alpha);
        }
    }
    x
}

/// Advances one component from `x` over `dt`.
fn step<R: Rng>(rng: &mut R, c: &Component<f64>, x: f64, dt: f64, cfg: &SimConfig) -> f64 {
    if dt <= 0.0 {
        return x;
    }
    match *c {
        Component::BrownianDrift { sigma, mu, .. } => x + mu * dt + sigma * dt.sqrt() * normal(rng),
        Component::GaussOu {
            lambda, theta, sigma, ..
        } => ou_step(rng, x, lambda, theta, sigma, dt),
        Component::DoubleGammaOuBm {
            lambda,
            theta,
            sigma,
            alpha_plus,
            alpha_minus,
            beta_plus,
            beta_minus,
            ..
        } => {
            let mut y = ou_step(rng, x, lambda, theta, sigma, dt);
            for _ in 0..poisson(rng, lambda * beta_plus * dt) {
                let tau: f64 = rng.gen::<f64>() * dt;
                y += exp_sample(rng, alpha_plus) * (-lambda * (dt - tau)).exp();
            }
            for _ in 0..poisson(rng, lambda * beta_minus * dt) {
                let tau: f64 = rng.gen::<f64>() * dt;
                y -= exp_sample(rng, alpha_minus) * (-lambda * (dt - tau)).exp();
            }
            y
        }
        Component::Cir { .. } | Component::CirJump { .. } => match cfg.cir_scheme {
            CirScheme::Exact => cir_jump_exact(rng, x, c, dt),
            CirScheme::FullTruncationEuler => cir_euler(rng, x, c, dt, cfg.steps_per_year),
        },
    }
}

fn ou_step<R: Rng>(rng: &mut R, x: f64, lambda: f64, theta: f64, sigma: f64, dt: f64) -> f64 {
    let e = (-lambda * dt).exp();
    let mean = theta + (x - theta) * e;
    if sigma == 0.0 {
        return mean;
    }
    let var = sigma * sigma * (-(-2.0 * lambda * dt).exp_m1()) / (2.0 * lambda);
    mean + var.sqrt() * normal(rng)
}

/// Fills `out` (`times.len() × dim`) with one path. Euler-scheme values are reported
/// truncated at zero for nonnegative components.
pub(crate) fn simulate_path(
    spec: &ProcessSpec<f64>,
    times: &[f64],
    cfg: &SimConfig,
    path: usize,
    state: &mut [f64],
    out: &mut [f64],
) {
    let mut rng = path_rng(cfg.seed, path);
    let dim = spec.dim();
    state.copy_from_slice(&spec.x0());
    let mut t = 0.0;
    for (i, &ti) in times.iter().enumerate() {
        let dt = ti - t;
        for (c, comp) in spec.components().iter().enumerate() {
            state[c] = step(&mut rng, comp, state[c], dt, cfg);
        }
        for c in 0..dim {
            let v = state[c];
            out[i * dim + c] = if spec.components()[c].is_nonnegative() {
                v.max(0.0)
            } else {
                v
            };
        }
        t = ti;
    }
}

/// Simulates `cfg.n_paths` paths observed at `times`.
pub fn simulate(spec: &ProcessSpec<f64>, times: &[f64], cfg: &SimConfig) -> Result<PathSet> {
    use rayon::prelude::*;
    cfg.validate()?;
    check_times(spec, times)?;
    let dim = spec.dim();
    let stride = times.len() * dim;
    let mut values = vec![0.0; stride * cfg.n_paths];
    values.par_chunks_mut(stride.max(1)).enumerate().for_each(|(p, out)| {
        let mut state = vec![0.0; dim];
        simulate_path(spec, times, cfg, p, &mut state, out);
    });
    Ok(PathSet {
        times: times.to_vec(),
        dim,
        n_paths: cfg.n_paths,
        values,
    })
}
