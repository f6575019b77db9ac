use serde::{Deserialize, Serialize};

use super::model::InflationModel;
use crate::affine::component_variance;
use crate::error::{RatesError, Result};
use crate::real::Real;

/// Log quantities that are affine in the state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// `log(1 + Δ_k F^k(t))`.
    ForwardRate(usize),
    /// `log 𝕀(t, T_j)`.
    ForwardCpi(usize),
    /// `log(1 + (T_k - T_{k-j}) F_I(t, T_{k-j}, T_k))`, given as `(k - j, k)`.
    ForwardInflation(usize, usize),
}

impl<T: Real> InflationModel<T> {
    /// State loading `B` of a quantity at time `t`.
    pub fn loading(&self, t: T, q: Quantity) -> Result<Vec<T>> {
        match q {
            Quantity::ForwardRate(k) => {
                self.check_index(k, 2)?;
                Ok(self.ab(t, self.u(k - 1), self.u(k))?.1)
            }
            Quantity::ForwardCpi(j) => {
                self.check_index(j, 1)?;
                self.need_inflation()?;
                Ok(self.ab(t, self.v(j), self.u(j))?.1)
            }
            Quantity::ForwardInflation(kj, k) => {
                self.check_index(k, 1)?;
                self.need_inflation()?;
                if kj >= k {
                    return Err(RatesError::InvalidParameter(format!("need T_{kj} < T_{k}")));
                }
                if kj == 0 {
                    return Ok(self.ab(t, self.v(k), self.u(k))?.1);
                }
                let tj = self.date(kj);
                if t > tj {
                    return Err(RatesError::InvalidParameter("t must not exceed T_{k-j}".into()));
                }
                let (_, sv) = self.phi_psi_real(self.horizon() - tj, self.v(k))?;
                let (_, bj) = self.cpi_loadings(kj)?;
                let w: Vec<T> = sv.iter().zip(&bj).map(|(a, b)| *a - *b).collect();
                let (_, sw) = self.phi_psi_real(tj - t, &w)?;
                let (_, su) = self.phi_psi_real(self.horizon() - t, self.u(k))?;
                Ok(sw.iter().zip(&su).map(|(a, b)| *a - *b).collect())
            }
        }
    }

    /// Correlation of two log quantities at time `t` under `Q^T`, using independence of
    /// the components started from `x0`.
    pub fn correlation(&self, t: T, a: Quantity, b: Quantity) -> Result<T> {
        let ba = self.loading(t, a)?;
        let bb = self.loading(t, b)?;
        let var: Vec<T> = self
            .spec()
            .components()
            .iter()
            .map(|c| component_variance(c, t))
            .collect::<Result<_>>()?;
        let (mut cov, mut va, mut vb) = (T::zero(), T::zero(), T::zero());
        for i in 0..var.len() {
            cov = cov + ba[i] * bb[i] * var[i];
            va = va + ba[i] * ba[i] * var[i];
            vb = vb + bb[i] * bb[i] * var[i];
        }
        if !(va > T::zero() && vb > T::zero()) {
            return Err(RatesError::DegenerateVariance);
        }
        Ok((cov / (va.sqrt() * vb.sqrt())).max(-T::one()).min(T::one()))
    }
}
