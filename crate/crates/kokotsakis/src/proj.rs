//! Points on the real projective line.
//!
//! Tangent half-angle substitutions map dihedral angles onto `RP¹`; the value
//! `∞` corresponds to a dihedral angle of π and occurs at flattening events,
//! so it has to be a first-class value rather than an overflow.

use crate::Real;

/// A point of `RP¹` stored as a `(numerator, denominator)` pair.
///
/// `(x, 1)` is the finite value `x`, `(1, 0)` is the point at infinity.
/// The representation is kept unnormalized; use [`Proj::unit`] for a
/// scale-free representative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Proj<F> {
    pub num: F,
    pub den: F,
}

impl<F: Real> Proj<F> {
    pub fn new(num: F, den: F) -> Self {
        Proj { num, den }
    }

    pub fn from_real(x: F) -> Self {
        Proj { num: x, den: F::one() }
    }

    pub fn infinity() -> Self {
        Proj { num: F::one(), den: F::zero() }
    }

    pub fn is_infinite(&self) -> bool {
        self.den == F::zero()
    }

    /// The affine value `num/den`; infinite when `den == 0`.
    pub fn value(&self) -> F {
        self.num / self.den
    }

    /// Representative scaled to unit Euclidean norm, so that homogenized
    /// polynomial residuals are comparable near infinity.
    pub fn unit(&self) -> (F, F) {
        let n = self.num.hypot(self.den);
        if n == F::zero() {
            (F::zero(), F::zero())
        } else {
            (self.num / n, self.den / n)
        }
    }

    /// The angle whose tangent half-angle is this value, in `[-π, π]`.
    pub fn angle(&self) -> F {
        // canonicalize the representative so the doubled atan2 stays in range
        let flip = self.den < F::zero() || (self.den == F::zero() && self.num < F::zero());
        let (n, d) = if flip { (-self.num, -self.den) } else { (self.num, self.den) };
        F::two() * n.atan2(d)
    }

    pub fn recip(&self) -> Self {
        Proj { num: self.den, den: self.num }
    }

    pub fn neg(&self) -> Self {
        Proj { num: -self.num, den: self.den }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_value_and_angle() {
        let p = Proj::from_real(1.0f64);
        assert_eq!(p.value(), 1.0);
        assert!((p.angle() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn infinity_maps_to_pi() {
        let p = Proj::<f64>::infinity();
        assert!(p.is_infinite());
        assert!((p.angle() - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn unit_has_norm_one() {
        let (a, b) = Proj::new(3.0f64, -4.0).unit();
        assert!((a.hypot(b) - 1.0).abs() < 1e-15);
    }
}
