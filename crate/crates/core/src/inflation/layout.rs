use serde::{Deserialize, Serialize};

use crate::error::{RatesError, Result};
use crate::real::Real;

/// Exponent vectors `u_k` (or `v_k`) for `k = 1..N`.
pub type ExponentSeq<T> = Vec<Vec<T>>;

/// Structured exponents of the inflation market model on a semiannual grid with `N = 2M`
/// dates and driving process `(X⁰, X¹..X^M, X^{M+1}..X^{2M})`.
///
/// `u_k = ũ_k e⁰ + ū_k e^{⌈k/2⌉} + Σ_{l>⌈k/2⌉} ū_{2l-1} e^l` and `v_k` equals `u_k` on the
/// nominal coordinates except `ṽ_k` at `e⁰`, plus `v̄_k e^{M+⌈k/2⌉}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ParamLayout<T> {
    pub m: usize,
    pub tilde_u: Vec<T>,
    pub bar_u: Vec<T>,
    pub tilde_v: Vec<T>,
    pub bar_v: Vec<T>,
}

/// Coordinate `⌈k/2⌉` of the yearly process carrying `ū_k`.
pub fn year_of(k: usize) -> usize {
    k.div_ceil(2)
}

impl<T: Real> ParamLayout<T> {
    /// Layout without inflation: `ṽ = ũ`, `v̄ = 0`.
    pub fn nominal(m: usize, tilde_u: Vec<T>, bar_u: Vec<T>) -> Result<Self> {
        let n = 2 * m;
        let l = ParamLayout {
            m,
            tilde_v: tilde_u.clone(),
            bar_v: vec![T::zero(); n],
            tilde_u,
            bar_u,
        };
        l.validate()?;
        Ok(l)
    }

    /// Number of tenor dates `N = 2M`.
    pub fn n(&self) -> usize {
        2 * self.m
    }

    /// Dimension `2M + 1` of the full driving process.
    pub fn full_dim(&self) -> usize {
        2 * self.m + 1
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if self.m == 0 {
            return Err(RatesError::Layout("at least one year is required".into()));
        }
        for (name, v) in [
            ("tilde_u", &self.tilde_u),
            ("bar_u", &self.bar_u),
            ("tilde_v", &self.tilde_v),
            ("bar_v", &self.bar_v),
        ] {
            if v.len() != n {
                return Err(RatesError::Layout(format!(
                    "{name} has {} entries, expected {n}",
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(RatesError::Layout(format!("{name} has a non-finite entry")));
            }
        }
        if let Some(k) = self.tilde_u.iter().chain(&self.bar_u).position(|&x| x < T::zero()) {
            return Err(RatesError::Layout(format!(
                "negative nominal exponent at position {}",
                k + 1
            )));
        }
        if let Some(k) = self.tilde_u.windows(2).position(|w| w[1] > w[0]) {
            return Err(RatesError::Layout(format!("tilde_u increases at k={}", k + 2)));
        }
        let us = self.u_vectors();
        for k in 1..n {
            if let Some(i) = us[k].iter().zip(&us[k - 1]).position(|(a, b)| a > b) {
                return Err(RatesError::Layout(format!(
                    "u_{} exceeds u_{} at coordinate {i}",
                    k + 1,
                    k
                )));
            }
        }
        Ok(())
    }

    /// `u_k` in `ℝ^{2M+1}` for `1 ≤ k ≤ N`.
    pub fn u_vector(&self, k: usize) -> Vec<T> {
        let mut u = vec![T::zero(); self.full_dim()];
        u[0] = self.tilde_u[k - 1];
        let y = year_of(k);
        u[y] = self.bar_u[k - 1];
        for l in y + 1..=self.m {
            u[l] = self.bar_u[2 * l - 2];
        }
        u
    }

    /// `v_k` in `ℝ^{2M+1}` for `1 ≤ k ≤ N`.
    pub fn v_vector(&self, k: usize) -> Vec<T> {
        let mut v = self.u_vector(k);
        v[0] = self.tilde_v[k - 1];
        v[self.m + year_of(k)] = self.bar_v[k - 1];
        v
    }

    pub fn u_vectors(&self) -> Vec<Vec<T>> {
        (1..=self.n()).map(|k| self.u_vector(k)).collect()
    }

    pub fn v_vectors(&self) -> Vec<Vec<T>> {
        (1..=self.n()).map(|k| self.v_vector(k)).collect()
    }

    /// `(u_k, v_k)` for `k = 1..N`, after checking the layout invariants.
    pub fn assemble_vectors(&self) -> Result<(ExponentSeq<T>, ExponentSeq<T>)> {
        self.validate()?;
        Ok((self.u_vectors(), self.v_vectors()))
    }
}
