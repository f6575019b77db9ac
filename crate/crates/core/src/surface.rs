//! Price and implied-volatility grids in the layouts of the volatility surface and
//! inflation fit tables.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::black::{black_implied_vol, OptionKind};
use crate::cosh::{CoshLiborModel, PricingOptions};
use crate::error::{RatesError, Result};
use crate::inflation::{FourierOptions, InflationModel};
use crate::market::{write_csv, CapFloor};

/// One row of `vol_surface.csv`. The volatility is `None` where no Black volatility
/// reproduces the price, e.g. for strikes below the forward-rate lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapletVolPoint {
    pub expiry_years: f64,
    pub strike: f64,
    pub implied_vol: Option<f64>,
    pub price: f64,
}

/// Annual forward inflation and its approximation from forward CPI ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForwardInflationPoint {
    pub maturity_years: usize,
    pub forward_inflation: f64,
    pub index_ratio_approximation: f64,
}

/// Inflation caplet or floorlet on the annual rate ending at `maturity_years`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InflationOptionPoint {
    pub maturity_years: usize,
    pub strike: f64,
    #[serde(rename = "type")]
    pub kind: CapFloor,
    pub price_bps: f64,
    /// Shifted-Black volatility against the forward-CPI-ratio approximation.
    pub implied_vol: Option<f64>,
}

pub fn write_surface<R: Serialize>(path: &Path, rows: &[R]) -> Result<()> {
    write_csv(path, rows)
}

fn grid<'a>(outer: &'a [usize], strikes: &'a [f64]) -> Vec<(usize, f64)> {
    outer
        .iter()
        .flat_map(|&k| strikes.iter().map(move |&s| (k, s)))
        .collect()
}

/// Caplets fixing at `T_k` for each `k` in `fixings`. Volatilities are implied from the
/// out-of-the-money side: the floorlet below the forward, the caplet above.
pub fn cosh_caplet_surface(
    model: &CoshLiborModel<f64>,
    fixings: &[usize],
    strikes: &[f64],
    contour: Option<f64>,
    opts: &PricingOptions<f64>,
) -> Result<Vec<CapletVolPoint>> {
    grid(fixings, strikes)
        .par_iter()
        .map(|&(k, strike)| {
            let expiry = model.grid().date(k);
            let forward = model.forward_rate(k + 1)?;
            let annuity = model.grid().accrual(k + 1) * model.discount(k + 1)?;
            let floorlet = model.floorlet_price_with(k, strike, contour, opts)?;
            let price = floorlet + model.caplet_parity_term(k, strike)?;
            let (kind, otm) = if strike >= forward {
                (OptionKind::Call, price)
            } else {
                (OptionKind::Put, floorlet)
            };
            let implied_vol = black_implied_vol(kind, otm, forward, strike, expiry, annuity, 0.0).ok();
            Ok(CapletVolPoint {
                expiry_years: expiry,
                strike,
                implied_vol,
                price,
            })
        })
        .collect()
}

/// Nominal caplets on `F^{2y}` (fixing at `y - 1/2`) for each year `y`.
pub fn nominal_caplet_surface(
    model: &InflationModel<f64>,
    years: &[usize],
    strikes: &[f64],
    opts: &FourierOptions<f64>,
) -> Result<Vec<CapletVolPoint>> {
    grid(years, strikes)
        .par_iter()
        .map(|&(y, strike)| {
            let k = 2 * y;
            let expiry = model.date(k - 1);
            let forward = model.forward_rate(k)?;
            let annuity = model.grid().accrual(k) * model.discount(k)?;
            let kind = if strike >= forward {
                OptionKind::Call
            } else {
                OptionKind::Put
            };
            let otm = model.nominal_option_price_with(kind, k, strike, opts)?;
            let parity = annuity * (forward - strike);
            let price = if kind == OptionKind::Call { otm } else { otm + parity };
            let implied_vol = black_implied_vol(kind, otm, forward, strike, expiry, annuity, 0.0).ok();
            Ok(CapletVolPoint {
                expiry_years: expiry,
                strike,
                implied_vol,
                price,
            })
        })
        .collect()
}

fn forward_cpi0(model: &InflationModel<f64>, k: usize) -> Result<f64> {
    if k == 0 {
        Ok(1.0)
    } else {
        model.forward_cpi0(k)
    }
}

fn check_years(model: &InflationModel<f64>, years: &[usize]) -> Result<()> {
    match years.iter().find(|&&y| y == 0 || y > model.years()) {
        Some(y) => Err(RatesError::InvalidParameter(format!(
            "maturity {y}y outside 1..={}",
            model.years()
        ))),
        None => Ok(()),
    }
}

pub fn forward_inflation_curve(model: &InflationModel<f64>, years: &[usize]) -> Result<Vec<ForwardInflationPoint>> {
    check_years(model, years)?;
    years
        .iter()
        .map(|&y| {
            let (kj, k) = (2 * y - 2, 2 * y);
            Ok(ForwardInflationPoint {
                maturity_years: y,
                forward_inflation: model.forward_inflation_rate0(kj, k)?,
                index_ratio_approximation: forward_cpi0(model, k)? / forward_cpi0(model, kj)? - 1.0,
            })
        })
        .collect()
}

/// Floorlets below `floor_below` and caplets at or above it, as in the inflation fit tables.
pub fn inflation_option_surface(
    model: &InflationModel<f64>,
    years: &[usize],
    strikes: &[f64],
    floor_below: f64,
    shift: f64,
    opts: &FourierOptions<f64>,
) -> Result<Vec<InflationOptionPoint>> {
    check_years(model, years)?;
    grid(years, strikes)
        .par_iter()
        .map(|&(y, strike)| {
            let (kj, k) = (2 * y - 2, 2 * y);
            let kind = if strike < floor_below {
                CapFloor::Floor
            } else {
                CapFloor::Cap
            };
            let price = model.inflation_option_price_with(kind.option_kind(), kj, k, strike, opts)?;
            let forward = forward_cpi0(model, k)? / forward_cpi0(model, kj)? - 1.0;
            let annuity = (model.date(k) - model.date(kj)) * model.discount(k)?;
            let expiry = model.date(k);
            let implied_vol =
                black_implied_vol(kind.option_kind(), price, forward, strike, expiry, annuity, shift).ok();
            Ok(InflationOptionPoint {
                maturity_years: y,
                strike,
                kind,
                price_bps: price * 1e4,
                implied_vol,
            })
        })
        .collect()
}
