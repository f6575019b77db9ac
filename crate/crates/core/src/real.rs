//! Scalar abstraction shared by the analytic parts of the library.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::{de::DeserializeOwned, Serialize};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Complementary error function.
    fn erfc(self) -> Self;

    /// Shorthand for converting a literal.
    #[inline]
    fn c(v: f64) -> Self {
        Self::from_f64(v).expect("literal fits the scalar type")
    }

    #[inline]
    fn from_usize_(n: usize) -> Self {
        Self::from_usize(n).expect("usize fits the scalar type")
    }
}

impl Real for f64 {
    #[inline]
    fn erfc(self) -> Self {
        libm::erfc(self)
    }
}

impl Real for f32 {
    #[inline]
    fn erfc(self) -> Self {
        libm::erfcf(self)
    }
}
