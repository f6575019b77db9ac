//! Market snapshot: discount curve, zero-coupon inflation swap rates, caplet volatilities
//! and inflation option prices, read from and written to CSV.

use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::black::{black_implied_vol, OptionKind};
use crate::error::{RatesError, Result};
use crate::inflation::{FourierOptions, InflationModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub maturity_years: f64,
    #[serde(rename = "discount_factor")]
    pub discount: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZciisQuote {
    pub maturity_years: usize,
    pub rate: f64,
}

/// Black volatility of the semiannual caplet fixing at `expiry_years`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapletVol {
    pub expiry_years: f64,
    pub strike: f64,
    pub vol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CapFloor {
    Cap,
    Floor,
}

impl CapFloor {
    pub fn option_kind(self) -> OptionKind {
        match self {
            CapFloor::Cap => OptionKind::Call,
            CapFloor::Floor => OptionKind::Put,
        }
    }
}

/// Price in basis points of notional of a caplet/floorlet on the annual inflation rate
/// over `[maturity_years - 1, maturity_years]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InflationOptionQuote {
    pub maturity_years: usize,
    pub strike: f64,
    #[serde(rename = "type")]
    pub kind: CapFloor,
    pub price_bps: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MarketSnapshot {
    pub curve: Vec<CurvePoint>,
    pub zciis: Vec<ZciisQuote>,
    pub caplet_vols: Vec<CapletVol>,
    pub inflation_options: Vec<InflationOptionQuote>,
}

const CURVE: &str = "curve.csv";
const ZCIIS: &str = "zciis.csv";
const CAPLETS: &str = "caplet_vols.csv";
const INFLATION: &str = "infl_options.csv";

pub(crate) fn read_csv<R: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<R>> {
    let file = File::open(path).map_err(|e| RatesError::Io(format!("{}: {e}", path.display())))?;
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file)
        .deserialize()
        .map(|r| r.map_err(|e| RatesError::Parse(format!("{}: {e}", path.display()))))
        .collect()
}

pub(crate) fn write_csv<R: Serialize>(path: &Path, rows: &[R]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn read_optional<R: for<'de> Deserialize<'de>>(dir: &Path, name: &str) -> Result<Vec<R>> {
    let path = dir.join(name);
    if path.exists() {
        read_csv(&path)
    } else {
        Ok(Vec::new())
    }
}

fn bad(msg: String) -> RatesError {
    RatesError::InvalidParameter(msg)
}

impl MarketSnapshot {
    /// Reads `curve.csv` (required) and, when present, `zciis.csv`, `caplet_vols.csv` and
    /// `infl_options.csv` from `dir`.
    pub fn from_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let snap = MarketSnapshot {
            curve: read_csv(&dir.join(CURVE))?,
            zciis: read_optional(dir, ZCIIS)?,
            caplet_vols: read_optional(dir, CAPLETS)?,
            inflation_options: read_optional(dir, INFLATION)?,
        };
        snap.validate()?;
        Ok(snap)
    }

    /// Writes the non-empty parts of the snapshot as CSV files into `dir`.
    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        write_csv(&dir.join(CURVE), &self.curve)?;
        if !self.zciis.is_empty() {
            write_csv(&dir.join(ZCIIS), &self.zciis)?;
        }
        if !self.caplet_vols.is_empty() {
            write_csv(&dir.join(CAPLETS), &self.caplet_vols)?;
        }
        if !self.inflation_options.is_empty() {
            write_csv(&dir.join(INFLATION), &self.inflation_options)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.curve.is_empty() {
            return Err(bad("empty discount curve".into()));
        }
        for w in self.curve.windows(2) {
            if !(w[0].maturity_years < w[1].maturity_years) {
                return Err(RatesError::NonmonotoneInput(
                    "curve maturities must be strictly increasing".into(),
                ));
            }
        }
        for p in &self.curve {
            if !(p.maturity_years > 0.0 && p.discount > 0.0 && p.discount <= 1.0) {
                return Err(bad(format!(
                    "curve point {p:?}: need maturity > 0 and discount in (0,1]"
                )));
            }
        }
        for w in self.zciis.windows(2) {
            if !(w[0].maturity_years < w[1].maturity_years) {
                return Err(RatesError::NonmonotoneInput(
                    "ZCIIS maturities must be strictly increasing".into(),
                ));
            }
        }
        for q in &self.zciis {
            if q.maturity_years == 0 || !(q.rate > -1.0) || !q.rate.is_finite() {
                return Err(bad(format!("ZCIIS quote {q:?}")));
            }
        }
        for w in self.caplet_vols.windows(2) {
            if w[1].expiry_years < w[0].expiry_years {
                return Err(RatesError::NonmonotoneInput("caplet expiries must be sorted".into()));
            }
        }
        for q in &self.caplet_vols {
            if !(q.vol > 0.0 && q.vol.is_finite()) {
                return Err(RatesError::OutOfBounds(format!(
                    "caplet volatility {} must be positive",
                    q.vol
                )));
            }
            if !(q.expiry_years > 0.0 && q.strike.is_finite()) {
                return Err(bad(format!("caplet quote {q:?}")));
            }
        }
        for w in self.inflation_options.windows(2) {
            if w[1].maturity_years < w[0].maturity_years {
                return Err(RatesError::NonmonotoneInput(
                    "inflation option maturities must be sorted".into(),
                ));
            }
        }
        for q in &self.inflation_options {
            if q.maturity_years == 0 || !q.strike.is_finite() || !(q.price_bps >= 0.0) {
                return Err(bad(format!("inflation option quote {q:?}")));
            }
        }
        Ok(())
    }

    /// Last curve maturity.
    pub fn curve_horizon(&self) -> f64 {
        self.curve.last().map_or(0.0, |p| p.maturity_years)
    }

    /// `P(0,t)`, log-linear in the discount factor between curve points with `P(0,0) = 1`.
    pub fn discount(&self, t: f64) -> Result<f64> {
        log_linear(
            t,
            self.curve.iter().map(|p| (p.maturity_years, p.discount)),
            "discount curve",
        )
    }

    /// `P(0,T_k)` for `k = 1..2m` on the semiannual grid.
    pub fn discounts(&self, m: usize) -> Result<Vec<f64>> {
        (1..=2 * m).map(|k| self.discount(k as f64 / 2.0)).collect()
    }

    /// Forward CPI ratio `𝕀(0,t)`, log-linear between `(1+ZCIIS(y))^y` at full years with `𝕀(0,0) = 1`.
    pub fn index_ratio(&self, t: f64) -> Result<f64> {
        let pts = self
            .zciis
            .iter()
            .map(|q| (q.maturity_years as f64, (1.0 + q.rate).powi(q.maturity_years as i32)));
        log_linear(t, pts, "ZCIIS curve")
    }

    /// `P_ILB(0,T_k)/P(0,T) = 𝕀(0,T_k) P(0,T_k)/P(0,T)` for `k = 1..2m`.
    pub fn ilb_ratios(&self, m: usize) -> Result<Vec<f64>> {
        let d = self.discounts(m)?;
        let p0t = d[2 * m - 1];
        d.iter()
            .enumerate()
            .map(|(i, p)| Ok(self.index_ratio((i + 1) as f64 / 2.0)? * p / p0t))
            .collect()
    }

    /// Caplet quotes on `F^{2y}`, which fixes at `y - 1/2`.
    pub fn caplets_for_year(&self, y: usize) -> Vec<CapletVol> {
        let fix = y as f64 - 0.5;
        self.caplet_vols
            .iter()
            .filter(|q| (q.expiry_years - fix).abs() < 1e-9)
            .copied()
            .collect()
    }

    pub fn inflation_options_for_year(&self, y: usize) -> Vec<InflationOptionQuote> {
        self.inflation_options
            .iter()
            .filter(|q| q.maturity_years == y)
            .copied()
            .collect()
    }
}

/// Quotes generated from a model: the semiannual curve, ZCIIS rates for every year (when
/// the model has inflation components), caplet volatilities on `F^{2y}` (implied from the
/// out-of-the-money side, skipping options worth less than `1e-9` of their annuity) and inflation
/// caps (strike at or above the forward) or floors (below) on the annual rate ending at `y`.
pub fn synthetic_snapshot(
    model: &InflationModel<f64>,
    caplet_strikes: &[f64],
    inflation_strikes: &[f64],
    opts: &FourierOptions<f64>,
) -> Result<MarketSnapshot> {
    let m = model.years();
    let mut snap = MarketSnapshot::default();
    for k in 1..=model.n() {
        snap.curve.push(CurvePoint {
            maturity_years: model.date(k),
            discount: model.discount(k)?,
        });
    }
    for y in 1..=m {
        let k = 2 * y;
        let fix = model.date(k - 1);
        let fwd = model.forward_rate(k)?;
        let annuity = model.grid().accrual(k) * model.discount(k)?;
        for &strike in caplet_strikes {
            let kind = if strike >= fwd {
                OptionKind::Call
            } else {
                OptionKind::Put
            };
            let p = model.nominal_option_price_with(kind, k, strike, opts)?;
            if p < 1e-9 * annuity {
                continue;
            }
            let vol = black_implied_vol(kind, p, fwd, strike, fix, annuity, 0.0)?;
            snap.caplet_vols.push(CapletVol {
                expiry_years: fix,
                strike,
                vol,
            });
        }
    }
    if model.has_inflation() {
        for y in 1..=m {
            snap.zciis.push(ZciisQuote {
                maturity_years: y,
                rate: model.zciis_rate(y)?,
            });
            let (kj, k) = (2 * y - 2, 2 * y);
            let fwd = model.forward_inflation_rate0(kj, k)?;
            for &strike in inflation_strikes {
                let kind = if strike >= fwd { CapFloor::Cap } else { CapFloor::Floor };
                let p = model.inflation_option_price_with(kind.option_kind(), kj, k, strike, opts)?;
                snap.inflation_options.push(InflationOptionQuote {
                    maturity_years: y,
                    strike,
                    kind,
                    price_bps: p * 1e4,
                });
            }
        }
    }
    snap.validate()?;
    Ok(snap)
}

fn log_linear(t: f64, pts: impl Iterator<Item = (f64, f64)>, what: &str) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(bad(format!("negative time {t}")));
    }
    let (mut t0, mut l0) = (0.0, 0.0);
    for (t1, v) in pts {
        let l1 = v.ln();
        if t <= t1 + 1e-12 {
            let w = if t1 > t0 { ((t - t0) / (t1 - t0)).min(1.0) } else { 1.0 };
            return Ok((l0 + w * (l1 - l0)).exp());
        }
        (t0, l0) = (t1, l1);
    }
    Err(RatesError::InvalidParameter(format!("{what} does not reach t = {t}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_hits_nodes() {
        let s = MarketSnapshot {
            curve: vec![
                CurvePoint {
                    maturity_years: 1.0,
                    discount: 0.97,
                },
                CurvePoint {
                    maturity_years: 3.0,
                    discount: 0.9,
                },
            ],
            zciis: vec![
                ZciisQuote {
                    maturity_years: 1,
                    rate: 0.02,
                },
                ZciisQuote {
                    maturity_years: 2,
                    rate: 0.025,
                },
            ],
            ..Default::default()
        };
        assert_eq!(s.discount(1.0).unwrap(), 0.97);
        assert!((s.discount(2.0).unwrap() - (0.97f64 * 0.9).sqrt()).abs() < 1e-15);
        assert!((s.discount(0.5).unwrap() - 0.97f64.sqrt()).abs() < 1e-15);
        assert!((s.index_ratio(2.0).unwrap() - 1.025f64.powi(2)).abs() < 1e-15);
        assert!((s.index_ratio(0.5).unwrap() - 1.02f64.sqrt()).abs() < 1e-15);
        assert!(s.discount(3.5).is_err());
    }
}
