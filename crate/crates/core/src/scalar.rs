//! Scalar abstraction. Every numeric kernel in this crate is generic over a
//! real floating-point type; `f64` is the default used by the CLI and the
//! concrete aliases at the crate root.

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

/// Real scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Display
    + LowerExp
    + Debug
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`, for constants and RNG draws.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("constant representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + Sum
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Display
        + LowerExp
        + Debug
        + Send
        + Sync
        + 'static
{
}

/// Diameter of projective space in the Fubini-Study metric: pi / sqrt(2).
pub fn max_geodesic<F: Real>() -> F {
    F::PI() / F::SQRT_2()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn max_geodesic_value() {
        let d: f64 = max_geodesic();
        assert!((d - 2.221441469079183).abs() < 1e-15);
    }

    #[test]
    fn works_for_f32() {
        let d: f32 = max_geodesic();
        assert!((d - 2.2214415).abs() < 1e-6);
    }
}
