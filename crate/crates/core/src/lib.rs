//! Affine interest-rate and inflation market models.

// Negated float comparisons are used deliberately so that NaN falls on the rejecting side.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops mirror the component layout of the formulas.
#![allow(clippy::needless_range_loop)]

pub mod affine;
pub mod black;
pub mod calibration;
pub mod cosh;
pub mod error;
pub mod fourier;
pub mod inflation;
pub mod market;
pub mod mc;
pub mod numerics;
pub mod real;
pub mod surface;
pub mod verify;

pub use error::{RatesError, Result};
pub use real::Real;

// Double-precision instances of the generic model types.
pub type Component = affine::Component<f64>;
pub type ProcessSpec = affine::ProcessSpec<f64>;
pub type PhiPsi = affine::PhiPsi<f64>;
pub type TenorGrid = cosh::TenorGrid<f64>;
pub type CoshLiborModel = cosh::CoshLiborModel<f64>;
pub type PricingOptions = cosh::PricingOptions<f64>;
pub type ParamLayout = inflation::ParamLayout<f64>;
pub type InflationModel = inflation::InflationModel<f64>;
pub type FourierOptions = inflation::FourierOptions<f64>;
pub type TailOptions = numerics::TailOptions<f64>;
