//! Calibration diagnostics and their JSON/CSV output.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::simplex::StopReason;
use super::Objective;
use crate::affine::ProcessDocument;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Market {
    Nominal,
    Inflation,
}

/// Fit of one quote. Volatilities are Black (nominal) or shifted Black (inflation).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuoteResidual {
    pub stage: usize,
    pub expiry_years: f64,
    pub strike: f64,
    #[serde(rename = "type")]
    pub kind: String,
    pub market_price: f64,
    pub model_price: f64,
    pub market_vol: Option<f64>,
    pub model_vol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundAudit {
    /// Tenor index of the forward rate `F^k`.
    pub k: usize,
    pub bound: f64,
    /// The bound reaches the configured threshold.
    pub flagged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageReport {
    pub market: Market,
    /// Year `y` of the process `X^y` (nominal) or `X^{M+y}` (inflation).
    pub stage: usize,
    pub objective_kind: Objective,
    pub objective: f64,
    pub evaluations: usize,
    /// `None` when the stage had no quotes and kept its starting parameters.
    pub stop: Option<StopReason>,
    pub parameters: ProcessDocument,
    /// The exponents refitted with the stage: `(ū_{2y-1}, ū_{2y})` or `(v̄_{2y-1}, v̄_{2y})`.
    pub exponents: [f64; 2],
    /// `(evaluation, best objective)` at every improvement.
    pub improvements: Vec<(usize, f64)>,
    pub residuals: Vec<QuoteResidual>,
    pub lower_bounds: Vec<LowerBoundAudit>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub stages: Vec<StageReport>,
    /// Largest relative error of the fitted nominal (and ILB) term structures.
    pub term_structure_error: f64,
    /// Audit of every forward rate `F^k`, `k ≥ 2`, of the final model.
    pub lower_bounds: Vec<LowerBoundAudit>,
}

impl CalibrationReport {
    pub fn any_flagged(&self) -> bool {
        self.lower_bounds.iter().any(|a| a.flagged)
    }

    pub fn stages_of(&self, market: Market) -> impl Iterator<Item = &StageReport> {
        self.stages.iter().filter(move |s| s.market == market)
    }

    /// Writes `report.json` plus `residuals_nominal.csv` and `residuals_inflation.csv`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(self)?)?;
        for (market, name) in [
            (Market::Nominal, "residuals_nominal.csv"),
            (Market::Inflation, "residuals_inflation.csv"),
        ] {
            let mut w = csv::Writer::from_path(dir.join(name))?;
            w.write_record([
                "stage",
                "expiry_years",
                "strike",
                "type",
                "market_price",
                "model_price",
                "market_vol",
                "model_vol",
            ])?;
            for r in self.stages_of(market).flat_map(|s| &s.residuals) {
                let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
                w.write_record([
                    r.stage.to_string(),
                    r.expiry_years.to_string(),
                    r.strike.to_string(),
                    r.kind.clone(),
                    r.market_price.to_string(),
                    r.model_price.to_string(),
                    opt(r.market_vol),
                    opt(r.model_vol),
                ])?;
            }
            w.flush()?;
        }
        Ok(())
    }
}
