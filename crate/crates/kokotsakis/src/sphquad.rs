//! Spherical quadrilaterals and their involution factors.
//!
//! The configuration space of a spherical four-bar with orthogonal diagonals
//! is cut out by `(z² + λ)(w² + μ) = ν z w` in tangent half-angle coordinates
//! of the two dihedral angles adjacent to the side `δ`. This module decides
//! orthodiagonality and ellipticity, computes the factors `(λ, μ, ν)`, and
//! realizes an orthodiagonal quadrilateral constructively from its sides.

use crate::{Proj, Real};
use thiserror::Error;

/// Gate width for detecting a right angle in the piecewise factor formulas.
/// The general-case formulas degenerate there, so nearby sides are routed to
/// the dedicated right-angle cases.
pub const RIGHT_ANGLE_TOL: f64 = 1e-9;

/// Denominator floor below which a factor is declared undefined.
const DEGENERATE_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum SphquadError {
    #[error("invalid side length {0}: sides must be finite, in (0, 2π) and different from π")]
    InvalidSide(f64),
    #[error("degenerate quadrilateral: {0}")]
    DegenerateQuad(&'static str),
    #[error("sides violate the orthodiagonality relation (residual {0:.3e})")]
    NotOrthodiagonal(f64),
    #[error("no orthodiagonal realization found: {0}")]
    Unrealizable(&'static str),
}

/// Side lengths of a spherical quadrilateral in cyclic order.
///
/// `beta` and `delta` lie in `(0, π)` resp. `(0, 2π)`; `alpha` and `gamma`
/// may take values in `(0, π) ∪ (π, 2π)` — the latter branch encodes a wing
/// whose corner folds to the other side of the base edge (same tangent,
/// opposite cosine).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphericalQuad<F> {
    pub alpha: F,
    pub beta: F,
    pub gamma: F,
    pub delta: F,
}

/// The coefficients `(λ, μ, ν)` of the configuration-curve equation
/// `(z² + λ)(w² + μ) = ν z w` of an orthodiagonal quadrilateral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InvolutionFactors<F> {
    pub lambda: F,
    pub mu: F,
    pub nu: F,
}

/// Lengths of the four diagonal sub-arcs cut by the intersection point of the
/// diagonals, ordered so that consecutive pairs span the sides:
/// `cos a·cos b = cos α`, …, `cos d·cos a = cos δ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagonalSegments<F> {
    pub a: F,
    pub b: F,
    pub c: F,
    pub d: F,
}

fn valid_side<F: Real>(v: F) -> bool {
    v.is_finite() && v > F::zero() && v < F::tau_full() && (v - F::PI()).abs() > F::lit(1e-15)
}

impl<F: Real> SphericalQuad<F> {
    pub fn new(alpha: F, beta: F, gamma: F, delta: F) -> Result<Self, SphquadError> {
        for v in [alpha, beta, gamma, delta] {
            if !valid_side(v) {
                return Err(SphquadError::InvalidSide(v.to_f64().unwrap_or(f64::NAN)));
            }
        }
        Ok(SphericalQuad { alpha, beta, gamma, delta })
    }

    /// Whether the diagonals are orthogonal: `cos α cos γ = cos β cos δ`
    /// up to `tol`.
    pub fn is_orthodiagonal(&self, tol: F) -> bool {
        self.orthodiagonality_residual().abs() <= tol
    }

    pub fn orthodiagonality_residual(&self) -> F {
        self.alpha.cos() * self.gamma.cos() - self.beta.cos() * self.delta.cos()
    }

    /// Whether the quadrilateral is elliptic: no signed sum
    /// `α ± β ± γ ± δ` vanishes mod 2π (within `tol`).
    pub fn is_elliptic(&self, tol: F) -> bool {
        self.elliptic_margin() >= tol
    }

    /// Distance of the closest signed sum `α ± β ± γ ± δ` to `0 (mod 2π)`.
    pub fn elliptic_margin(&self) -> F {
        let mut margin = F::infinity();
        for sb in [F::one(), -F::one()] {
            for sg in [F::one(), -F::one()] {
                for sd in [F::one(), -F::one()] {
                    let sum = self.alpha + sb * self.beta + sg * self.gamma + sd * self.delta;
                    let m = sum.rem_two_pi();
                    margin = margin.min(m.min(F::tau_full() - m));
                }
            }
        }
        margin
    }

    /// The involution factors `(λ, μ, ν)` of an orthodiagonal elliptic
    /// quadrilateral.
    ///
    /// The right-angle cases of the piecewise definitions are selected when a
    /// side is within [`RIGHT_ANGLE_TOL`] of π/2 (mod π). The general cases
    /// are evaluated in the product form `sin(δ±·)/sin(δ∓·)`, which agrees
    /// with the tangent quotient everywhere both are defined and stays exact
    /// when a single side is right.
    pub fn involution_factors(&self) -> Result<InvolutionFactors<F>, SphquadError> {
        let right = |v: F| {
            let m = v.rem_two_pi() % F::PI();
            (m - F::FRAC_PI_2()).abs() < F::lit(RIGHT_ANGLE_TOL)
        };
        let (alpha, beta, gamma, delta) = (self.alpha, self.beta, self.gamma, self.delta);
        let (a_right, g_right, d_right) = (right(alpha), right(gamma), right(delta));

        if a_right && g_right && d_right {
            // not covered by any case of the ν definition
            return Err(SphquadError::DegenerateQuad("α = γ = δ = π/2"));
        }

        let ratio = |num: F, den: F| -> Result<F, SphquadError> {
            if den.abs() < F::lit(DEGENERATE_TOL) {
                return Err(SphquadError::DegenerateQuad("vanishing factor denominator"));
            }
            let v = num / den;
            if v.abs() < F::lit(DEGENERATE_TOL) {
                return Err(SphquadError::DegenerateQuad("vanishing involution factor"));
            }
            Ok(v)
        };

        // (tan δ + tan x)/(tan δ - tan x) == sin(δ + x)/sin(δ - x)
        let lambda = if a_right && d_right {
            ratio(beta.cos() + gamma.cos(), beta.cos() - gamma.cos())?
        } else {
            ratio((delta + alpha).sin(), (delta - alpha).sin())?
        };
        let mu = if g_right && d_right {
            ratio(beta.cos() + alpha.cos(), beta.cos() - alpha.cos())?
        } else {
            ratio((delta + gamma).sin(), (delta - gamma).sin())?
        };
        let nu = if !d_right {
            ratio((lambda - F::one()) * (mu - F::one()), delta.cos())?
        } else if g_right {
            let v = F::two() * (mu - F::one()) * alpha.tan();
            if v.abs() < F::lit(DEGENERATE_TOL) {
                return Err(SphquadError::DegenerateQuad("vanishing involution factor"));
            }
            v
        } else {
            // δ = α = π/2
            let v = F::two() * (lambda - F::one()) * gamma.tan();
            if v.abs() < F::lit(DEGENERATE_TOL) {
                return Err(SphquadError::DegenerateQuad("vanishing involution factor"));
            }
            v
        };
        Ok(InvolutionFactors { lambda, mu, nu })
    }
}

impl<F: Real> InvolutionFactors<F> {
    /// Residual of the configuration-curve equation at a projective point.
    ///
    /// Finite arguments evaluate the affine polynomial
    /// `(z² + λ)(w² + μ) − ν z w`; an infinite coordinate is handled by
    /// homogenizing with `(1 : 0)`.
    pub fn config_residual(&self, z: Proj<F>, w: Proj<F>) -> F {
        let (z0, z1) = if z.is_infinite() { (F::one(), F::zero()) } else { (z.value(), F::one()) };
        let (w0, w1) = if w.is_infinite() { (F::one(), F::zero()) } else { (w.value(), F::one()) };
        self.homogeneous_residual((z0, z1), (w0, w1))
    }

    /// The degree-(2,2) homogeneous form evaluated on explicit coordinate
    /// pairs.
    pub fn homogeneous_residual(&self, (z0, z1): (F, F), (w0, w1): (F, F)) -> F {
        (z0 * z0 + self.lambda * z1 * z1) * (w0 * w0 + self.mu * w1 * w1)
            - self.nu * z0 * z1 * w0 * w1
    }

    /// `z`-values over which the projection `(z, w) → z` of the configuration
    /// curve branches (the `w`-discriminant vanishes). Roots may be complex.
    pub fn branch_points(&self) -> [num_complex::Complex<F>; 4] {
        crate::resultant::branch_points_quad(self).points
    }
}

/// Realize an orthodiagonal quadrilateral with the given sides by locating
/// a diagonal intersection point: the four right spherical triangles give
/// `cos a·cos b = cos α` and cyclic.
///
/// The closing relation `cos d·cos a = cos δ` holds identically once the
/// sides satisfy the orthodiagonality identity (the chain telescopes to
/// `cos α cos γ / cos β`), so the segments form a one-parameter family —
/// the flexion of the quadrilateral itself, along which the diagonals stay
/// orthogonal. The canonical representative is taken at the midpoint of the
/// valid `a`-domain, whose endpoints are located by bisection.
pub fn construct_orthodiagonal<F: Real>(
    alpha: F,
    beta: F,
    gamma: F,
    delta: F,
) -> Result<DiagonalSegments<F>, SphquadError> {
    for v in [alpha, beta, gamma, delta] {
        if !(v.is_finite() && v > F::zero() && v < F::PI()) {
            return Err(SphquadError::InvalidSide(v.to_f64().unwrap_or(f64::NAN)));
        }
    }
    let residual = alpha.cos() * gamma.cos() - beta.cos() * delta.cos();
    if residual.abs() > F::lit(1e-9) {
        return Err(SphquadError::NotOrthodiagonal(residual.to_f64().unwrap_or(f64::NAN)));
    }

    // chain a -> b -> c -> d, each step a right spherical triangle; valid
    // when every arccos argument stays inside [-1, 1] with interior segments
    let margin = F::lit(1e-7);
    let chain = |a: F| -> Option<(F, F, F)> {
        let step = |side: F, seg: F| -> Option<F> {
            let r = side.cos() / seg.cos();
            if r.abs() < F::one() - F::lit(1e-12) {
                Some(r.acos())
            } else {
                None
            }
        };
        let b = step(alpha, a)?;
        let c = step(beta, b)?;
        let d = step(gamma, c)?;
        for v in [a, b, c, d] {
            if v < margin || v > F::PI() - margin {
                return None;
            }
        }
        Some((b, c, d))
    };

    // scan for the valid a-interval, refine its endpoints by bisection
    let lo_all = F::lit(1e-7);
    let hi_all = F::PI() - F::lit(1e-7);
    let n = 1024usize;
    let at = |i: usize| {
        lo_all + (hi_all - lo_all) * F::from_usize(i).unwrap() / F::from_usize(n).unwrap()
    };
    let first = (0..=n)
        .find(|&i| chain(at(i)).is_some())
        .ok_or(SphquadError::Unrealizable("no admissible diagonal split"))?;
    let last = (first..=n).take_while(|&i| chain(at(i)).is_some()).last().unwrap();
    let refine = |mut inside: F, mut outside: F| {
        for _ in 0..40 {
            let mid = (inside + outside) / F::two();
            if chain(mid).is_some() {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    };
    let lo = if first == 0 { at(0) } else { refine(at(first), at(first - 1)) };
    let hi = if last == n { at(n) } else { refine(at(last), at(last + 1)) };
    let a = (lo + hi) / F::two();
    let (b, c, d) = chain(a).ok_or(SphquadError::Unrealizable("empty interior domain"))?;
    Ok(DiagonalSegments { a, b, c, d })
}
