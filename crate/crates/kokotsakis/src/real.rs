use num_traits::{Float, FloatConst, FromPrimitive};

/// Scalar type for all geometric and numeric routines: `f32` or `f64`.
///
/// The tolerances used throughout assume IEEE 754 semantics; the acceptance
/// thresholds are only meaningful at `f64` precision.
pub trait Real:
    Float + FloatConst + FromPrimitive + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
    /// Convert an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    /// 2π.
    #[inline]
    fn tau_full() -> Self {
        Self::PI() + Self::PI()
    }

    /// Reduce an angle into `[0, 2π)`.
    #[inline]
    fn rem_two_pi(self) -> Self {
        let tp = Self::tau_full();
        let mut v = self % tp;
        if v < Self::zero() {
            v = v + tp;
        }
        v
    }

    #[inline]
    fn asinh_(self) -> Self {
        (self + (self * self + Self::one()).sqrt()).ln()
    }

    #[inline]
    fn acosh_(self) -> Self {
        (self + (self * self - Self::one()).sqrt()).ln()
    }
}

impl Real for f32 {}
impl Real for f64 {}
