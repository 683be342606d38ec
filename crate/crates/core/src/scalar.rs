//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into this scalar type.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("f64 literal representable as scalar")
    }

    fn from_usize_exact(value: usize) -> Self {
        Self::from_usize(value).expect("usize representable as scalar")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Reduces an angle to `[0, 2π)`.
pub fn normalize_angle<T: Scalar>(theta: T) -> T {
    let tau = T::TAU();
    let r = theta % tau;
    let r = if r < T::zero() { r + tau } else { r };
    // `r + tau` can round up to exactly tau for tiny negative inputs.
    if r >= tau {
        T::zero()
    } else {
        r
    }
}

/// Rounds half-up to the nearest integer (`floor(x + 0.5)`).
pub fn round_half_up<T: Scalar>(value: T) -> i64 {
    (value + T::lit(0.5))
        .floor()
        .to_i64()
        .expect("finite value within i64 range")
}
