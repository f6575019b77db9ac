//! Instrument descriptions accepted by `price`, and their valuation under either model.

use affine_rates::black::OptionKind;
use affine_rates::error::{RatesError, Result};
use affine_rates::{CoshLiborModel, FourierOptions, InflationModel};
use serde::{Deserialize, Serialize};

/// Indices are tenor dates on the semiannual grid; `kj` is the start date of an inflation
/// period ending at `k`. `contour` overrides the Fourier damping.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Instrument {
    Discount {
        k: usize,
    },
    ForwardRate {
        k: usize,
    },
    /// Cosh model: floorlet on `F^{k+1}` fixing at `T_k`.
    Floorlet {
        k: usize,
        strike: f64,
        contour: Option<f64>,
    },
    /// Cosh model: caplet on `F^{k+1}` fixing at `T_k`.
    Caplet {
        k: usize,
        strike: f64,
        contour: Option<f64>,
    },
    PutSwaption {
        alpha: usize,
        beta: usize,
        strike: f64,
        contour: Option<f64>,
    },
    CpiCall {
        k: usize,
        strike: f64,
        contour: Option<f64>,
    },
    CpiPut {
        k: usize,
        strike: f64,
        contour: Option<f64>,
    },
    /// Inflation model: caplet on the nominal forward `F^k`.
    NominalCaplet {
        k: usize,
        strike: f64,
        contour: Option<f64>,
    },
    NominalFloorlet {
        k: usize,
        strike: f64,
        contour: Option<f64>,
    },
    InflationCaplet {
        kj: usize,
        k: usize,
        strike: f64,
        contour: Option<f64>,
    },
    InflationFloorlet {
        kj: usize,
        k: usize,
        strike: f64,
        contour: Option<f64>,
    },
    ForwardInflation {
        kj: usize,
        k: usize,
    },
    ZciisRate {
        years: usize,
    },
    YyiisRate {
        years: usize,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct Priced {
    #[serde(flatten)]
    pub instrument: Instrument,
    pub value: f64,
}

pub enum Model {
    Cosh(CoshLiborModel),
    Inflation(InflationModel),
}

impl Model {
    /// Reads either model document; the inflation form is recognised by its `specs` array.
    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text)?;
        if v.get("specs").is_some() {
            Ok(Model::Inflation(serde_json::from_value(v)?))
        } else {
            Ok(Model::Cosh(serde_json::from_value(v)?))
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(match self {
            Model::Cosh(m) => serde_json::to_string_pretty(m)?,
            Model::Inflation(m) => serde_json::to_string_pretty(m)?,
        })
    }

    pub fn price(&self, i: &Instrument) -> Result<f64> {
        match self {
            Model::Cosh(m) => price_cosh(m, i),
            Model::Inflation(m) => price_inflation(m, i),
        }
    }
}

fn unsupported(i: &Instrument, model: &str) -> RatesError {
    RatesError::InvalidParameter(format!("{i:?} is not priced by the {model} model"))
}

fn price_cosh(m: &CoshLiborModel, i: &Instrument) -> Result<f64> {
    match *i {
        Instrument::Discount { k } => m.discount(k),
        Instrument::ForwardRate { k } => m.forward_rate(k),
        Instrument::Floorlet { k, strike, contour } => m.floorlet_price(k, strike, contour),
        Instrument::Caplet { k, strike, contour } => m.caplet_price(k, strike, contour),
        Instrument::PutSwaption {
            alpha,
            beta,
            strike,
            contour,
        } => m.put_swaption_price(alpha, beta, strike, contour),
        _ => Err(unsupported(i, "cosh LIBOR")),
    }
}

fn price_inflation(m: &InflationModel, i: &Instrument) -> Result<f64> {
    let opts = |contour| FourierOptions {
        contour,
        ..FourierOptions::default()
    };
    match *i {
        Instrument::Discount { k } => m.discount(k),
        Instrument::ForwardRate { k } => m.forward_rate(k),
        Instrument::CpiCall { k, strike, contour } => {
            m.cpi_option_price_with(OptionKind::Call, k, strike, &opts(contour))
        }
        Instrument::CpiPut { k, strike, contour } => {
            m.cpi_option_price_with(OptionKind::Put, k, strike, &opts(contour))
        }
        Instrument::NominalCaplet { k, strike, contour } => {
            m.nominal_option_price_with(OptionKind::Call, k, strike, &opts(contour))
        }
        Instrument::NominalFloorlet { k, strike, contour } => {
            m.nominal_option_price_with(OptionKind::Put, k, strike, &opts(contour))
        }
        Instrument::InflationCaplet { kj, k, strike, contour } => {
            m.inflation_option_price_with(OptionKind::Call, kj, k, strike, &opts(contour))
        }
        Instrument::InflationFloorlet { kj, k, strike, contour } => {
            m.inflation_option_price_with(OptionKind::Put, kj, k, strike, &opts(contour))
        }
        Instrument::ForwardInflation { kj, k } => m.forward_inflation_rate0(kj, k),
        Instrument::ZciisRate { years } => m.zciis_rate(years),
        Instrument::YyiisRate { years } => m.yyiis_rate(years),
        _ => Err(unsupported(i, "inflation")),
    }
}
