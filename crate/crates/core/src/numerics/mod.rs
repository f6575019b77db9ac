//! Small numerical toolbox: quadrature, root finding, ODE integration and the normal law.

pub mod normal;
pub mod ode;
pub mod quadrature;
pub mod roots;

pub use normal::{norm_cdf, norm_pdf};
pub use ode::{dopri5, OdeOptions};
pub use quadrature::{gauss_kronrod, integrate_adaptive, integrate_semi_infinite, TailOptions};
pub use roots::{bisect, golden_max};
