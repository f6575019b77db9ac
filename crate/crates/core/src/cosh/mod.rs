//! Cosh-martingale LIBOR model.

mod bounds;
mod brownian;
mod grid;
mod model;
mod pricing;

pub use bounds::{find_exercise_bounds, locate_max, ExerciseBounds};
pub use brownian::{brownian_closed_form_floorlet, brownian_closed_form_put_swaption};
pub use grid::TenorGrid;
pub use model::{fit_u_sequence, symmetric_reach, CoshLiborModel, CoshTerms};
pub use pricing::{h_from_terms, CoshPayoff, PricingOptions};
