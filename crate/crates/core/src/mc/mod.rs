//! Monte Carlo oracle: path simulation for every process family and payoff estimation.

mod cosh;
mod estimate;
mod inflation;
mod simulate;

pub use cosh::{caplet_mc, floorlet_mc, put_swaption_mc};
pub use estimate::{mc_price, mc_price_many, McEstimate};
pub use inflation::{cpi_option_mc, forward_inflation_mc, inflation_option_mc, nominal_option_mc};
pub use simulate::{simulate, CirScheme, PathSet, PathView, SimConfig};
