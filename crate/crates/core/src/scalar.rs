//! Scalar abstraction shared by the numerical kernels.
//!
//! Quadrature, special functions, register-state expectations, normal-mode
//! solving and curve fitting are written once against [`Real`] and work for
//! `f32` and `f64`. The physics layers that carry SI constants (`ħ²` is
//! ~1e-68 and underflows `f32`) are concrete in `f64`.

use num_traits::{Float, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};

/// Floating point scalar usable by every generic kernel: `f32` or `f64`.
///
/// Dense linear algebra additionally needs `nalgebra::RealField`; kernels
/// that decompose matrices add that bound locally.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + nalgebra::Scalar
    + Copy
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal.
    #[inline]
    fn lit(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(v: usize) -> Self {
        <Self as FromPrimitive>::from_usize(v).expect("usize representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
