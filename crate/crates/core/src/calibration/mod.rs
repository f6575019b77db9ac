//! Staged calibration of the inflation market model: nominal processes backwards in
//! maturity against caplets, then inflation processes forwards against inflation options.

mod params;
mod report;
mod simplex;
mod stages;

use serde::{Deserialize, Serialize};

use crate::affine::{Component, ProcessDocument};
use crate::error::{RatesError, Result};
use crate::inflation::{FourierOptions, RootPolicy};
use crate::numerics::TailOptions;

pub use params::Bounds;
pub use report::{CalibrationReport, LowerBoundAudit, Market, QuoteResidual, StageReport};
pub use simplex::{nelder_mead, SimplexOptions, SimplexResult, StopReason};
pub use stages::{calibrate_inflation, calibrate_nominal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Mean squared error of prices per unit notional.
    MsePrice,
    /// Mean squared error of Black implied volatilities (shifted for inflation options).
    MseImpliedVol,
}

/// Settings of both calibration stages; every field has a default.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationConfig {
    /// Number of years `M`; defaults to the whole years covered by the curve.
    pub years: Option<usize>,
    /// Objective evaluations per stage.
    pub budget: usize,
    pub nominal_objective: Objective,
    pub inflation_objective: Objective,
    /// Common factor `X⁰`, kept fixed.
    pub common: ProcessDocument,
    /// Starting point of every nominal process `X¹..X^M`.
    pub nominal_initial: ProcessDocument,
    /// Starting point of every inflation process `X^{M+1}..X^{2M}`.
    pub inflation_initial: ProcessDocument,
    pub nominal_bounds: Bounds,
    pub inflation_bounds: Bounds,
    /// Start each stage from the parameters fitted at the previous stage of the same market.
    pub warm_start: bool,
    /// Overrides the default `ũ` (solved from `X⁰` and the curve).
    pub tilde_u: Option<Vec<f64>>,
    /// Overrides the default `ṽ_k = ũ_k (1 + c k)`.
    pub tilde_v: Option<Vec<f64>>,
    /// `c` in the default `ṽ`.
    pub tilde_v_slope: f64,
    pub root_policy: RootPolicy,
    /// Fourier damping; probed per price when absent.
    pub contour: Option<f64>,
    pub quadrature: TailOptions<f64>,
    /// Jump rates must exceed the largest exponent on their coordinate by this margin.
    pub alpha_margin: f64,
    /// Stop a stage once its objective reaches this value.
    pub f_target: f64,
    pub f_tol: f64,
    pub x_tol: f64,
    pub initial_step: f64,
    pub max_restarts: usize,
    pub seed: u64,
    /// Shift on the inflation rate for shifted-Black implied volatilities.
    pub inflation_vol_shift: f64,
    /// Squared-error charge for a model price without implied volatility.
    pub vol_penalty: f64,
    /// Forward-rate lower bounds at or above this level are flagged.
    pub lower_bound_threshold: f64,
}

fn bounds(entries: &[(&str, f64, f64)]) -> Bounds {
    entries.iter().map(|&(n, lo, hi)| (n.to_string(), [lo, hi])).collect()
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        let common = Component::Cir {
            lambda: 0.026,
            theta: 0.65,
            eta: 0.5,
            x0: 3.45,
        };
        let nominal = Component::CirJump {
            lambda: 0.3,
            theta: 0.02,
            eta: 0.08,
            alpha: 20.0,
            beta: 0.3,
            x0: 0.02,
        };
        let inflation = Component::DoubleGammaOuBm {
            lambda: 0.5,
            theta: 0.0,
            sigma: 0.02,
            alpha_plus: 40.0,
            alpha_minus: 40.0,
            beta_plus: 0.5,
            beta_minus: 0.5,
            x0: 0.0,
        };
        CalibrationConfig {
            years: None,
            budget: 2000,
            nominal_objective: Objective::MseImpliedVol,
            inflation_objective: Objective::MsePrice,
            common: common.to_document(),
            nominal_initial: nominal.to_document(),
            inflation_initial: inflation.to_document(),
            nominal_bounds: bounds(&[
                ("lambda", 1e-3, 5.0),
                ("theta", 1e-5, 1.0),
                ("eta", 1e-3, 2.0),
                ("alpha", 0.5, 500.0),
                ("beta", 1e-4, 20.0),
                ("x0", 1e-5, 1.0),
            ]),
            inflation_bounds: bounds(&[
                ("lambda", 1e-3, 5.0),
                ("sigma", 1e-4, 1.0),
                ("alpha_plus", 0.5, 500.0),
                ("alpha_minus", 0.5, 500.0),
                ("beta_plus", 1e-4, 20.0),
                ("beta_minus", 1e-4, 20.0),
                ("x0", -1.0, 1.0),
            ]),
            warm_start: true,
            tilde_u: None,
            tilde_v: None,
            tilde_v_slope: 0.08,
            root_policy: RootPolicy::Positive,
            contour: None,
            quadrature: TailOptions {
                tail_tol: 1e-6,
                rel_tol: 1e-8,
                ..TailOptions::default()
            },
            alpha_margin: 0.1,
            f_target: 1e-16,
            f_tol: 1e-15,
            x_tol: 1e-9,
            initial_step: 0.1,
            max_restarts: 4,
            seed: 42,
            inflation_vol_shift: 1.0,
            vol_penalty: 1.0,
            lower_bound_threshold: 0.005,
        }
    }
}

impl CalibrationConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: CalibrationConfig = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(RatesError::InvalidParameter(m.to_string()));
        if self.budget == 0 {
            return bad("budget must be positive");
        }
        if self.years == Some(0) {
            return bad("years must be positive");
        }
        if !(self.alpha_margin >= 0.0 && self.inflation_vol_shift > 0.0 && self.vol_penalty >= 0.0) {
            return bad("alpha_margin, inflation_vol_shift and vol_penalty must be nonnegative (shift positive)");
        }
        if !(self.initial_step > 0.0 && self.x_tol > 0.0 && self.f_tol >= 0.0) {
            return bad("initial_step and x_tol must be positive, f_tol nonnegative");
        }
        let common = self.common()?;
        if !matches!(common, Component::Cir { .. } | Component::CirJump { .. }) {
            return bad("the common factor must be nonnegative (CIR or CIRJump)");
        }
        let nominal = self.nominal_initial()?;
        if !nominal.is_nonnegative() {
            return bad("nominal processes must be nonnegative");
        }
        params::Parameterisation::new(&nominal, &self.nominal_bounds)?;
        params::Parameterisation::new(&self.inflation_initial()?, &self.inflation_bounds)?;
        Ok(())
    }

    pub fn common(&self) -> Result<Component<f64>> {
        component(&self.common)
    }

    pub fn nominal_initial(&self) -> Result<Component<f64>> {
        component(&self.nominal_initial)
    }

    pub fn inflation_initial(&self) -> Result<Component<f64>> {
        component(&self.inflation_initial)
    }

    pub fn fourier(&self) -> FourierOptions<f64> {
        FourierOptions {
            contour: self.contour,
            tail: self.quadrature,
        }
    }

    pub(crate) fn simplex(&self) -> SimplexOptions {
        SimplexOptions {
            budget: self.budget,
            initial_step: self.initial_step,
            f_target: self.f_target,
            f_tol: self.f_tol,
            x_tol: self.x_tol,
            max_restarts: self.max_restarts,
            seed: self.seed,
        }
    }
}

fn component(doc: &ProcessDocument) -> Result<Component<f64>> {
    let c = Component::from_document(doc)?;
    c.validate()?;
    Ok(c)
}
