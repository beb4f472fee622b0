//! Scalar abstraction: all core math is generic over a floating-point type.

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar usable throughout the crate: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + core::iter::Sum
    + core::fmt::Debug
    + core::fmt::Display
    + core::fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// Lift an `f64` literal into the scalar type.
    #[inline]
    fn cst(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// Lift a count into the scalar type.
    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    /// `4π`, the surface area of the unit sphere.
    #[inline]
    fn four_pi() -> Self {
        Self::cst(4.0) * Self::PI()
    }
}

impl Real for f32 {}
impl Real for f64 {}
