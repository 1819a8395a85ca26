//! Scalar abstraction for the series and quadrature kernels.
//!
//! The closed-form layer (special functions, weights, ball geometry) is
//! generic over [`Real`] so it runs at `f32` or `f64`; the sampling and
//! reporting layers are `f64`. All stated tolerances in the crate assume
//! `f64`.

use num_traits::{Float, FromPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FromPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`; exact for `f64` itself.
    #[inline]
    fn cst(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable")
    }

    /// Conversion from a small nonnegative integer.
    #[inline]
    fn of(k: usize) -> Self {
        Self::from_usize(k).expect("usize constant representable")
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn half() -> Self {
        Self::one() / Self::two()
    }

    #[inline]
    fn pi() -> Self {
        Self::cst(std::f64::consts::PI)
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_round_trip() {
        assert_eq!(f64::cst(0.25), 0.25);
        assert_eq!(f32::of(7), 7.0);
        assert_eq!(f64::two(), 2.0);
        assert!((f32::pi() - std::f32::consts::PI).abs() < 1e-7);
    }

    #[test]
    fn f32_instantiation_tracks_f64() {
        // The generic layer runs at f32 with correspondingly reduced
        // accuracy.
        let p32: f32 = crate::weightfn::phi(3, 0.5f32).unwrap();
        let p64: f64 = crate::weightfn::phi(3, 0.5f64).unwrap();
        assert!((p32 as f64 - p64).abs() < 1e-5, "{p32} vs {p64}");
        let v32: f32 = crate::ballgeo::hyperbolic_ball_volume(2, 1.0f32).unwrap();
        let v64: f64 = crate::ballgeo::hyperbolic_ball_volume(2, 1.0f64).unwrap();
        assert!((v32 as f64 - v64).abs() < 1e-4);
        let b32: f32 = crate::specfun::beta(0.5f32, 0.5f32).unwrap();
        assert!((b32 - std::f32::consts::PI).abs() < 1e-5);
    }
}
