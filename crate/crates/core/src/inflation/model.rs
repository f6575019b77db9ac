use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::layout::ParamLayout;
use crate::affine::{PhiPsi, ProcessSpec};
use crate::cosh::TenorGrid;
use crate::error::{RatesError, Result};
use crate::real::Real;

/// Affine inflation market model: `P(t,T_k)/P(t,T) = M_t^{u_k}` and
/// `P_ILB(t,T_k)/P(t,T) = M_t^{v_k}` with `M_t^u = E^{Q^T}[e^{u·X_T} | F_t]`.
///
/// A spec with `M + 1` components is a purely nominal model; inflation quantities then
/// require the full `2M + 1` components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InflationModelDocument<T>", into = "InflationModelDocument<T>")]
#[serde(bound = "T: Real")]
pub struct InflationModel<T> {
    spec: ProcessSpec<T>,
    layout: ParamLayout<T>,
    grid: TenorGrid<T>,
    p0t: T,
    u: Vec<Vec<T>>,
    v: Vec<Vec<T>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
struct InflationModelDocument<T> {
    specs: Vec<ProcessSpec<T>>,
    layout: ParamLayout<T>,
    grid: TenorGrid<T>,
    #[serde(rename = "P0T")]
    p0t: T,
}

impl<T: Real> TryFrom<InflationModelDocument<T>> for InflationModel<T> {
    type Error = RatesError;
    fn try_from(d: InflationModelDocument<T>) -> Result<Self> {
        let horizon = d.grid.last();
        let spec = ProcessSpec::product(d.specs, horizon)?;
        let m = InflationModel::new(spec, d.layout, d.p0t)?;
        if m.grid != d.grid {
            return Err(RatesError::InvalidParameter(
                "grid must be semiannual with 2M dates".into(),
            ));
        }
        Ok(m)
    }
}

impl<T: Real> From<InflationModel<T>> for InflationModelDocument<T> {
    fn from(m: InflationModel<T>) -> Self {
        let h = m.spec.horizon();
        let specs = m
            .spec
            .components()
            .iter()
            .map(|c| ProcessSpec::single(*c, h).expect("validated component"))
            .collect();
        InflationModelDocument {
            specs,
            layout: m.layout,
            grid: m.grid,
            p0t: m.p0t,
        }
    }
}

pub(crate) fn cvec<T: Real>(u: &[T]) -> Vec<Complex<T>> {
    u.iter().map(|&x| Complex::new(x, T::zero())).collect()
}

pub(crate) fn cdot<T: Real>(a: &[Complex<T>], x: &[T]) -> Complex<T> {
    a.iter()
        .zip(x)
        .fold(Complex::new(T::zero(), T::zero()), |s, (p, &xi)| s + p * xi)
}

pub(crate) fn axpy<T: Real>(a: &[Complex<T>], b: &[Complex<T>], sb: Complex<T>) -> Vec<Complex<T>> {
    a.iter().zip(b).map(|(x, y)| x + y * sb).collect()
}

impl<T: Real> InflationModel<T> {
    pub fn new(spec: ProcessSpec<T>, layout: ParamLayout<T>, p0t: T) -> Result<Self> {
        layout.validate()?;
        let m = layout.m;
        let grid = TenorGrid::semiannual(layout.n())?;
        if (spec.horizon() - grid.last()).abs() > T::c(1e-12) * grid.last() {
            return Err(RatesError::InvalidParameter(format!(
                "horizon {} must equal the last tenor date {}",
                spec.horizon(),
                grid.last()
            )));
        }
        let dim = spec.dim();
        if dim != m + 1 && dim != 2 * m + 1 {
            return Err(RatesError::WrongSpec(format!(
                "expected {} or {} components, got {dim}",
                m + 1,
                2 * m + 1
            )));
        }
        if let Some(i) = spec.components()[..=m].iter().position(|c| !c.is_nonnegative()) {
            return Err(RatesError::WrongSpec(format!(
                "nominal component {i} must be nonnegative"
            )));
        }
        if !(p0t > T::zero() && p0t <= T::one()) {
            return Err(RatesError::InvalidParameter("P(0,T) must lie in (0, 1]".into()));
        }
        let u: Vec<Vec<T>> = layout
            .u_vectors()
            .into_iter()
            .map(|mut x| {
                x.truncate(dim);
                x
            })
            .collect();
        let v: Vec<Vec<T>> = layout
            .v_vectors()
            .into_iter()
            .map(|mut x| {
                x.truncate(dim);
                x
            })
            .collect();
        let dom = spec.uniform_domain();
        for (k, x) in u.iter().enumerate() {
            if !dom.contains(x) {
                return Err(RatesError::Domain(format!("u_{} outside the moment domain", k + 1)));
            }
        }
        if dim == 2 * m + 1 {
            for (k, x) in v.iter().enumerate() {
                if !dom.contains(x) {
                    return Err(RatesError::Domain(format!("v_{} outside the moment domain", k + 1)));
                }
            }
        }
        Ok(InflationModel {
            spec,
            layout,
            grid,
            p0t,
            u,
            v,
        })
    }

    /// The same model with a new layout.
    pub fn with_layout(&self, layout: ParamLayout<T>) -> Result<Self> {
        Self::new(self.spec.clone(), layout, self.p0t)
    }

    pub fn spec(&self) -> &ProcessSpec<T> {
        &self.spec
    }

    pub fn layout(&self) -> &ParamLayout<T> {
        &self.layout
    }

    pub fn grid(&self) -> &TenorGrid<T> {
        &self.grid
    }

    pub fn p0t(&self) -> T {
        self.p0t
    }

    /// Number of years `M`.
    pub fn years(&self) -> usize {
        self.layout.m
    }

    /// Number of tenor dates `N`.
    pub fn n(&self) -> usize {
        self.layout.n()
    }

    pub fn horizon(&self) -> T {
        self.spec.horizon()
    }

    pub fn x0(&self) -> Vec<T> {
        self.spec.x0()
    }

    pub fn has_inflation(&self) -> bool {
        self.spec.dim() == 2 * self.layout.m + 1
    }

    pub fn date(&self, k: usize) -> T {
        self.grid.date(k)
    }

    pub(crate) fn check_index(&self, k: usize, from: usize) -> Result<()> {
        if k < from || k > self.n() {
            return Err(RatesError::InvalidParameter(format!(
                "tenor index {k} outside {from}..={}",
                self.n()
            )));
        }
        Ok(())
    }

    pub(crate) fn need_inflation(&self) -> Result<()> {
        if self.has_inflation() {
            Ok(())
        } else {
            Err(RatesError::WrongSpec(
                "nominal-only model has no inflation components".into(),
            ))
        }
    }

    /// `u_k` restricted to the model dimension.
    pub fn u(&self, k: usize) -> &[T] {
        &self.u[k - 1]
    }

    pub fn v(&self, k: usize) -> &[T] {
        &self.v[k - 1]
    }

    pub(crate) fn phi_psi(&self, t: T, u: &[Complex<T>]) -> Result<PhiPsi<T>> {
        self.spec.phi_psi(t, u)
    }

    pub(crate) fn phi_psi_real(&self, t: T, u: &[T]) -> Result<(T, Vec<T>)> {
        let pp = self.spec.phi_psi(t, &cvec(u))?;
        Ok((pp.phi.re, pp.psi.iter().map(|p| p.re).collect()))
    }

    /// `log M_t^u(x)`.
    pub fn log_martingale(&self, t: T, u: &[T], x: &[T]) -> Result<T> {
        let (phi, psi) = self.phi_psi_real(self.horizon() - t, u)?;
        Ok(phi + psi.iter().zip(x).fold(T::zero(), |s, (p, &xi)| s + *p * xi))
    }

    /// `P(0,T_k)/P(0,T) = M_0^{u_k}`.
    pub fn bond_ratio(&self, k: usize) -> Result<T> {
        self.check_index(k, 1)?;
        Ok(self.log_martingale(T::zero(), self.u(k), &self.x0())?.exp())
    }

    /// `P_ILB(0,T_k)/P(0,T) = M_0^{v_k}`.
    pub fn ilb_ratio(&self, k: usize) -> Result<T> {
        self.check_index(k, 1)?;
        self.need_inflation()?;
        Ok(self.log_martingale(T::zero(), self.v(k), &self.x0())?.exp())
    }

    /// `P(0,T_k)`, with `P(0,T_0) = 1`.
    pub fn discount(&self, k: usize) -> Result<T> {
        if k == 0 {
            return Ok(T::one());
        }
        Ok(self.p0t * self.bond_ratio(k)?)
    }

    /// Simple forward rate `F^k(0)` over `[T_{k-1}, T_k]`.
    pub fn forward_rate(&self, k: usize) -> Result<T> {
        self.check_index(k, 1)?;
        Ok((self.discount(k - 1)? / self.discount(k)? - T::one()) / self.grid.accrual(k))
    }

    /// Infimum of `F^k(t)` over `t ∈ [0, T_{k-1}]` and nonnegative states, `k ≥ 2`.
    ///
    /// `log(1 + Δ_k F^k(t)) = A(t) + B(t)·X_t` with `B ≥ 0`, so the state infimum sits at
    /// `X_t = 0`; the time infimum is taken over a uniform grid of 64 steps.
    pub fn forward_rate_lower_bound(&self, k: usize) -> Result<T> {
        self.check_index(k, 2)?;
        let fix = self.date(k - 1);
        let steps = 64;
        let mut best = T::infinity();
        for i in 0..=steps {
            let t = fix * T::from_usize_(i) / T::from_usize_(steps);
            let (a, _) = self.ab(t, self.u(k - 1), self.u(k))?;
            best = best.min(a.exp_m1() / self.grid.accrual(k));
        }
        Ok(best)
    }

    /// `(A, B)` of `log(M_t^a / M_t^b) = A + B·X_t`.
    pub fn ab(&self, t: T, a: &[T], b: &[T]) -> Result<(T, Vec<T>)> {
        let tau = self.horizon() - t;
        let (pa, sa) = self.phi_psi_real(tau, a)?;
        let (pb, sb) = self.phi_psi_real(tau, b)?;
        Ok((pa - pb, sa.iter().zip(&sb).map(|(x, y)| *x - *y).collect()))
    }

    /// `(A_I^k, B_I^k)`: loadings of `log I(T_k)`; zero for `k = 0` since `I(0) = 1`.
    pub fn cpi_loadings(&self, k: usize) -> Result<(T, Vec<T>)> {
        if k == 0 {
            return Ok((T::zero(), vec![T::zero(); self.spec.dim()]));
        }
        self.need_inflation()?;
        self.ab(self.date(k), self.v(k), self.u(k))
    }
}
