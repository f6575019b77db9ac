//! Affine inflation market model: nominal and inflation-linked bonds as exponential-affine
//! martingales of one multi-factor process.

mod correlation;
mod fitting;
mod layout;
mod model;
mod pricing;

pub use correlation::Quantity;
pub use fitting::{default_tilde_u, default_tilde_v, fit_ubar_range, fit_ubar_sequence, RootPolicy, VbarFit};
pub use layout::{year_of, ParamLayout};
pub use model::InflationModel;
pub use pricing::FourierOptions;
