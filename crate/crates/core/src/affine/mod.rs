//! Affine driving processes: closed-form transforms, moment domains and Riccati checks.

mod component;
mod spec;

pub use component::Component;
pub use spec::{component_variance, MomentDomain, PhiPsi, ProcessDocument, ProcessSpec};
