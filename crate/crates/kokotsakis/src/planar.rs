//! Planar angles of a flexible polyhedron.
//!
//! Given the base angles `δ₁..δ₄` (summing to 2π) and one parameter `τ`,
//! the closed form for `r₁` with its trigonometric coefficient table yields
//! the quadruple `(r₁, c₁, r₃, c₃)`; inverting `r = 2λ/(λ²+1)` and applying
//! the sign bits `σ` recovers the side angles `αᵢ, γᵢ` and, through the
//! cos-product relation, `βᵢ`. The assembled data — base angles, four
//! spherical quadrilaterals, their involution factors and the reduced
//! coefficients — is a [`PolyhedronSpec`].

use crate::sphquad::{InvolutionFactors, SphericalQuad, SphquadError};
use crate::Real;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Window inside which a given `δ₄` is accepted and renormalized to
/// `2π − δ₁ − δ₂ − δ₃`. Wide enough for inputs quoted to five decimals.
pub const DELTA_SUM_TOL: f64 = 1e-4;
/// Half-open range enforcement for `r`, `c`: values must stay below `1 − RC_EDGE`.
pub const RC_EDGE: f64 = 1e-12;
/// Acceptance tolerance for the anti-involutive and proportionality relations.
pub const FACTOR_TOL: f64 = 1e-9;
/// Margin below which a quadrilateral counts as non-elliptic.
pub const ELLIPTIC_TOL: f64 = 1e-7;

#[derive(Debug, Error, PartialEq)]
pub enum PlanarError {
    #[error("base angle {0} is a right angle (mod π)")]
    RightAngle(f64),
    #[error("base angle {0} outside (0, 2π)")]
    DeltaRange(f64),
    #[error("base angles do not sum to 2π (off by {0:.3e})")]
    DeltaSum(f64),
    #[error("discriminant L(τ) negative ({0:.3e})")]
    NegativeDiscriminant(f64),
    #[error("denominator D(τ) vanishes")]
    ZeroDenominator,
    #[error("r/c value {0} outside [-1, 1) or zero")]
    OutOfRange(f64),
    #[error("cos βᵢ = {0} falls outside (-1, 1)")]
    BetaUndefined(f64),
    #[error("vertex quadrilateral {0} is not elliptic")]
    NotElliptic(usize),
    #[error("sigma signs violate the product constraints")]
    BadSigma,
    #[error("no cyclic re-enumeration matches the sign pattern")]
    NoValidPattern,
    #[error("spec is not flexible: ζ₁ = {0} ≤ 1")]
    NotFlexible(f64),
    #[error(transparent)]
    Quad(#[from] SphquadError),
}

/// Right-angle rejection window for base angles. Wider than the π/2 gate of
/// the factor formulas: inputs quoted to a few decimals still mean π/2, and
/// no valid construction survives with `cos δ` this small anyway.
pub const BASE_RIGHT_ANGLE_TOL: f64 = 1e-6;

fn is_right_mod_pi<F: Real>(v: F) -> bool {
    v.cos().abs() < F::lit(BASE_RIGHT_ANGLE_TOL)
}

/// Interior angles of the base quadrilateral, each in `(0, 2π)`, none a right
/// angle (mod π), summing to 2π.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseAngles<F> {
    pub deltas: [F; 4],
}

impl<F: Real> BaseAngles<F> {
    /// Validate the angles of a simple base quadrilateral. `δ₄` is
    /// renormalized to `2π − δ₁ − δ₂ − δ₃` when the given value is within
    /// [`DELTA_SUM_TOL`] of it.
    pub fn new(deltas: [F; 4]) -> Result<Self, PlanarError> {
        let mut deltas = deltas;
        for d in deltas {
            if !(d.is_finite() && d > F::zero() && d < F::tau_full()) {
                return Err(PlanarError::DeltaRange(d.to_f64().unwrap_or(f64::NAN)));
            }
            if is_right_mod_pi(d) {
                return Err(PlanarError::RightAngle(d.to_f64().unwrap_or(f64::NAN)));
            }
        }
        let closing = F::tau_full() - deltas[0] - deltas[1] - deltas[2];
        if (closing - deltas[3]).abs() > F::lit(DELTA_SUM_TOL) {
            return Err(PlanarError::DeltaSum((closing - deltas[3]).to_f64().unwrap_or(f64::NAN)));
        }
        deltas[3] = closing;
        Ok(BaseAngles { deltas })
    }

    /// Reconstruct base angles from `(x, y, s)`, reducing each angle mod 2π
    /// into `(0, 2π)`. This is the screening-side inverse of
    /// [`deltas_to_xys`]; the reduced representatives may describe a base
    /// that winds, which the admissibility pipeline treats through its
    /// trigonometric functions only.
    pub fn from_xys(p: &XYSParams<F>) -> Result<Self, PlanarError> {
        let h = F::FRAC_PI_2();
        let raw = [h + p.s + p.x, h - p.s + p.y, h + p.s - p.x, h - p.s - p.y];
        let mut deltas = [F::zero(); 4];
        for (i, d) in raw.into_iter().enumerate() {
            let d = d.rem_two_pi();
            // exclude right and straight angles symmetrically mod π
            if is_right_mod_pi(d) || d.sin().abs() < F::lit(1e-9) {
                return Err(PlanarError::RightAngle(d.to_f64().unwrap_or(f64::NAN)));
            }
            deltas[i] = d;
        }
        Ok(BaseAngles { deltas })
    }
}

/// The symmetrized base-angle parameters
/// `s = (δ₁−δ₂+δ₃−δ₄)/4`, `x = (δ₁−δ₃)/2`, `y = (δ₂−δ₄)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct XYSParams<F> {
    pub x: F,
    pub y: F,
    pub s: F,
}

pub fn deltas_to_xys<F: Real>(b: &BaseAngles<F>) -> XYSParams<F> {
    let [d1, d2, d3, d4] = b.deltas;
    XYSParams {
        x: (d1 - d3) / F::two(),
        y: (d2 - d4) / F::two(),
        s: (d1 - d2 + d3 - d4) / F::lit(4.0),
    }
}

/// The eleven trigonometric coefficients of the closed form for `r₁`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoefficientTable<F> {
    pub s10: F,
    pub s01: F,
    pub l20: F,
    pub l11: F,
    pub l02: F,
    pub n20: F,
    pub n11: F,
    pub n02: F,
    pub d20: F,
    pub d11: F,
    pub d02: F,
}

pub fn coefficient_table<F: Real>(p: &XYSParams<F>) -> CoefficientTable<F> {
    let (x, y, s) = (p.x, p.y, p.s);
    let two = F::two();
    let (c2x, c2y, c2s) = ((two * x).cos(), (two * y).cos(), (two * s).cos());
    let four = F::lit(4.0);
    let six = F::lit(6.0);
    let eight = F::lit(8.0);
    CoefficientTable {
        s10: c2x + c2y + two * c2s,
        s01: c2x - c2y,
        l20: (c2x - c2y) * (c2x - c2y) + eight * c2s * (c2x + c2y),
        l11: two * (c2x - c2y) * (c2x + c2y + two * c2s),
        l02: (c2x + c2y - two * c2s) * (c2x + c2y - two * c2s),
        n20: (x + y).sin()
            * ((x - F::lit(3.0) * y).sin()
                + (F::lit(3.0) * x - y).sin()
                + six * (x - y + two * s).sin()
                - two * (x - y - two * s).sin()),
        n11: eight
            * ((x + s).sin().powi(2) * (x - s).cos().powi(2)
                + (y - s).sin().powi(2) * (y + s).cos().powi(2)),
        n02: (c2y - c2x) * (c2x + c2y - two * c2s),
        d20: (x - y).cos()
            * ((F::lit(3.0) * x + y).cos()
                + (x + F::lit(3.0) * y).cos()
                + two * (x + y - two * s).cos()
                + four * (x + F::lit(3.0) * s).cos() * (y - s).cos()),
        d11: (four * x).cos() - (four * y).cos() - four * (x + y).sin() * (x - y + two * s).sin(),
        d02: (x - y).sin()
            * ((x + F::lit(3.0) * y).sin() - (F::lit(3.0) * x + y).sin()
                + two * (x + y - two * s).sin()
                - four * (x + F::lit(3.0) * s).cos() * (y - s).sin()),
    }
}

/// `r₁(τ) = (N + S√L)/(2D)`, with the quadratic forms assembled from
/// `(sin τ, cos τ)` so that τ near ±π/2 stays well conditioned.
pub fn r1_of<F: Real>(tau: F, p: &XYSParams<F>) -> Result<F, PlanarError> {
    let t = coefficient_table(p);
    let (st, ct) = tau.sin_cos();
    let s = t.s10 * ct + t.s01 * st;
    let l = t.l20 * ct * ct + t.l11 * st * ct + t.l02 * st * st;
    let n = t.n20 * ct * ct + t.n11 * st * ct + t.n02 * st * st;
    let d = t.d20 * ct * ct + t.d11 * st * ct + t.d02 * st * st;
    if l < -F::lit(1e-14) {
        return Err(PlanarError::NegativeDiscriminant(l.to_f64().unwrap_or(f64::NAN)));
    }
    if d.abs() < F::lit(1e-300) {
        return Err(PlanarError::ZeroDenominator);
    }
    Ok((n + s * l.max(F::zero()).sqrt()) / (F::two() * d))
}

/// `(r₁, c₁, r₃, c₃)` with the symmetry transport
/// `c₁(τ) = r₁(τ+π, x, −y, s)`, `r₃(τ) = r₁(τ, −x, −y, s)`,
/// `c₃(τ) = r₁(τ+π, −x, y, s)`, each checked against `−1 ≤ v < 1`, `v ≠ 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RCQuadruple<F> {
    pub r1: F,
    pub c1: F,
    pub r3: F,
    pub c3: F,
}

impl<F: Real> RCQuadruple<F> {
    /// `rᵢ` for vertex `i` in `0..4`, extending by `r₂ = −r₁`, `r₄ = −r₃`.
    pub fn r(&self, i: usize) -> F {
        match i {
            0 => self.r1,
            1 => -self.r1,
            2 => self.r3,
            _ => -self.r3,
        }
    }

    /// `cᵢ` for vertex `i` in `0..4`, extending by `c₂ = −c₃`, `c₄ = −c₁`.
    pub fn c(&self, i: usize) -> F {
        match i {
            0 => self.c1,
            1 => -self.c3,
            2 => self.c3,
            _ => -self.c1,
        }
    }
}

pub fn rc_quadruple<F: Real>(tau: F, p: &XYSParams<F>) -> Result<RCQuadruple<F>, PlanarError> {
    let flip = |q: &XYSParams<F>, fx: bool, fy: bool| XYSParams {
        x: if fx { -q.x } else { q.x },
        y: if fy { -q.y } else { q.y },
        s: q.s,
    };
    let rc = RCQuadruple {
        r1: r1_of(tau, p)?,
        c1: r1_of(tau + F::PI(), &flip(p, false, true))?,
        r3: r1_of(tau, &flip(p, true, true))?,
        c3: r1_of(tau + F::PI(), &flip(p, true, false))?,
    };
    for v in [rc.r1, rc.c1, rc.r3, rc.c3] {
        if !v.is_finite()
            || v < -F::one()
            || v >= F::one() - F::lit(RC_EDGE)
            || v.abs() < F::lit(RC_EDGE)
        {
            return Err(PlanarError::OutOfRange(v.to_f64().unwrap_or(f64::NAN)));
        }
    }
    Ok(rc)
}

/// `Zᵢ = (1/cos²δᵢ)(1/rᵢ − 1)(1/cᵢ − 1)`; for a valid quadruple
/// `Z₁ = Z₃`, `Z₂ = Z₄` and `Z₁ + Z₂ = 4`, with `½Zᵢ = 1 − (−1)ⁱ tan τ`.
pub fn z_values<F: Real>(rc: &RCQuadruple<F>, deltas: &[F; 4]) -> [F; 4] {
    let mut z = [F::zero(); 4];
    for i in 0..4 {
        let a = F::one() / (deltas[i].cos() * deltas[i].cos());
        z[i] = a * (F::one() / rc.r(i) - F::one()) * (F::one() / rc.c(i) - F::one());
    }
    z
}

/// Invert `r = 2λ/(λ²+1)`: `λ = (1 ± √(1−r²))/r`. `plus` selects the branch
/// with `|λ| ≥ 1`; the two branches are mutual reciprocals.
pub fn lambda_of_r<F: Real>(r: F, plus: bool) -> F {
    let root = (F::one() - r * r).max(F::zero()).sqrt();
    if plus {
        (F::one() + root) / r
    } else {
        (F::one() - root) / r
    }
}

/// The four `(λᵢ, μᵢ)` from the quadruple. `plus = [λ₁, μ₁, λ₃, μ₃]` branch
/// selectors; vertices 2 and 4 follow from the anti-involutive pairing
/// `λ₂ = −λ₁`, `μ₂ = −μ₃`, `λ₄ = −λ₃`, `μ₄ = −μ₁`.
pub fn rc_to_lambda_mu<F: Real>(rc: &RCQuadruple<F>, plus: [bool; 4]) -> [(F, F); 4] {
    let l1 = lambda_of_r(rc.r1, plus[0]);
    let m1 = lambda_of_r(rc.c1, plus[1]);
    let l3 = lambda_of_r(rc.r3, plus[2]);
    let m3 = lambda_of_r(rc.c3, plus[3]);
    [(l1, m1), (-l1, -m3), (l3, m3), (-l3, -m1)]
}

/// Per-vertex sign bits for the angle recovery, constrained by
/// `σᵅ₁σᵅ₂ = σᵅ₃σᵅ₄ = σᵞ₁σᵞ₄ = σᵞ₂σᵞ₃ = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sigma {
    pub alpha: [i8; 4],
    pub gamma: [i8; 4],
}

impl Sigma {
    pub fn new(alpha: [i8; 4], gamma: [i8; 4]) -> Result<Self, PlanarError> {
        let s = Sigma { alpha, gamma };
        if !s.is_valid() {
            return Err(PlanarError::BadSigma);
        }
        Ok(s)
    }

    pub fn is_valid(&self) -> bool {
        self.alpha.iter().chain(self.gamma.iter()).all(|&v| v == 1 || v == -1)
            && self.alpha[0] * self.alpha[1] == 1
            && self.alpha[2] * self.alpha[3] == 1
            && self.gamma[0] * self.gamma[3] == 1
            && self.gamma[1] * self.gamma[2] == 1
    }

    /// Default bit assignment: `σᵅ ≡ +1`, `σᵞᵢ = sign(rᵢ)`. The γ-branch
    /// follows the sign of `r`, which respects the product constraints for
    /// every valid quadruple (`r₁r₃ < 0` in the admissible sign pattern) and
    /// reproduces the published worked configuration.
    pub fn default_for<F: Real>(rc: &RCQuadruple<F>) -> Self {
        let sg = |v: F| if v >= F::zero() { 1i8 } else { -1 };
        Sigma {
            alpha: [1; 4],
            gamma: [sg(rc.r(0)), sg(rc.r(1)), sg(rc.r(2)), sg(rc.r(3))],
        }
    }

    /// All sign assignments compatible with the product constraints, the
    /// default one first.
    pub fn candidates<F: Real>(rc: &RCQuadruple<F>) -> Vec<Sigma> {
        let mut out = vec![Sigma::default_for(rc)];
        for a1 in [1i8, -1] {
            for a3 in [1i8, -1] {
                for g1 in [1i8, -1] {
                    for g2 in [1i8, -1] {
                        let s = Sigma { alpha: [a1, a1, a3, a3], gamma: [g1, g2, g2, g1] };
                        if !out.contains(&s) {
                            out.push(s);
                        }
                    }
                }
            }
        }
        out
    }
}

/// Recover the four vertex quadrilaterals from the base angles, the
/// quadruple and the sign bits.
///
/// `tan αᵢ = σᵅᵢ √((1−rᵢ)/(1+rᵢ)) tan δᵢ` (and the same for `γᵢ` with `cᵢ`);
/// the principal value in `(0, π)` is shifted by π onto the `(π, 2π)` branch
/// when the sign bit is `−1`, so that every stored quadrilateral satisfies
/// the plain cos-product relation and `βᵢ = arccos(cos αᵢ cos γᵢ / cos δᵢ)`
/// is its actual cone angle.
pub fn recover_angles<F: Real>(
    base: &BaseAngles<F>,
    rc: &RCQuadruple<F>,
    sigma: &Sigma,
) -> Result<[SphericalQuad<F>; 4], PlanarError> {
    if !sigma.is_valid() {
        return Err(PlanarError::BadSigma);
    }
    let branch_angle = |v: F, sign: i8, delta: F| -> F {
        let w = ((F::one() - v) / (F::one() + v)).max(F::zero()).sqrt();
        let t = F::lit(sign as f64) * w * delta.tan();
        let mut principal = t.atan();
        if principal < F::zero() {
            principal = principal + F::PI();
        }
        if sign < 0 {
            principal + F::PI()
        } else {
            principal
        }
    };
    let mut quads = [SphericalQuad {
        alpha: F::one(),
        beta: F::one(),
        gamma: F::one(),
        delta: F::one(),
    }; 4];
    for i in 0..4 {
        let delta = base.deltas[i];
        let alpha = branch_angle(rc.r(i), sigma.alpha[i], delta);
        let gamma = branch_angle(rc.c(i), sigma.gamma[i], delta);
        let cb = alpha.cos() * gamma.cos() / delta.cos();
        if cb.abs() >= F::one() {
            return Err(PlanarError::BetaUndefined(cb.to_f64().unwrap_or(f64::NAN)));
        }
        let beta = cb.acos();
        let q = SphericalQuad::new(alpha, beta, gamma, delta)?;
        if !q.is_elliptic(F::lit(ELLIPTIC_TOL)) {
            return Err(PlanarError::NotElliptic(i));
        }
        quads[i] = q;
    }
    Ok(quads)
}

/// Apply one of the angle substitutions that keep the involution factors:
/// 1: `(α, γ) → (α−π, γ−π)`, 2: `(α, β) → (α−π, π−β)`,
/// 3: `(γ, β) → (γ−π, π−β)`, all mod 2π.
pub fn apply_vertex_symmetry<F: Real>(q: &SphericalQuad<F>, which: u8) -> SphericalQuad<F> {
    let shift = |v: F| (v - F::PI()).rem_two_pi();
    match which {
        1 => SphericalQuad { alpha: shift(q.alpha), gamma: shift(q.gamma), ..*q },
        2 => SphericalQuad { alpha: shift(q.alpha), beta: F::PI() - q.beta, ..*q },
        _ => SphericalQuad { gamma: shift(q.gamma), beta: F::PI() - q.beta, ..*q },
    }
}

/// A fully assembled polyhedron: base angles, parameter, vertex
/// quadrilaterals, involution factors, reduced coefficients and the sign
/// bookkeeping. Vertices are stored in the caller's enumeration;
/// `enumeration` is the cyclic shift that has been applied so far (the
/// normalized arrangement has `needed_shift() == 0`).
#[derive(Clone, Debug, PartialEq)]
pub struct PolyhedronSpec<F> {
    pub base: BaseAngles<F>,
    pub tau: F,
    pub quads: [SphericalQuad<F>; 4],
    pub factors: [InvolutionFactors<F>; 4],
    pub zetas: [F; 4],
    pub enumeration: u8,
    pub sigma: Sigma,
}

impl<F: Real> PolyhedronSpec<F> {
    /// Residuals of the anti-involutive pairing `λ₁ = −λ₂`, `μ₁ = −μ₄`,
    /// `μ₂ = −μ₃`, `λ₃ = −λ₄`.
    pub fn pairing_residuals(&self) -> [F; 4] {
        let f = &self.factors;
        [
            f[0].lambda + f[1].lambda,
            f[0].mu + f[3].mu,
            f[1].mu + f[2].mu,
            f[2].lambda + f[3].lambda,
        ]
    }

    /// Residuals of the resultant-proportionality system
    /// `ν₁²/(λ₁μ₁) = ν₃²/(λ₃μ₃)`, `ν₂²/(λ₂μ₂) = ν₄²/(λ₄μ₄)`,
    /// `ν₁²/(λ₁μ₁) + ν₂²/(λ₂μ₂) = 16`.
    pub fn proportionality_residuals(&self) -> [F; 3] {
        let q = |i: usize| {
            let f = &self.factors[i];
            f.nu * f.nu / (f.lambda * f.mu)
        };
        [q(0) - q(2), q(1) - q(3), q(0) + q(1) - F::lit(16.0)]
    }

    fn sign_rows(&self) -> [(bool, bool); 4] {
        let mut rows = [(false, false); 4];
        for i in 0..4 {
            rows[i] = (self.factors[i].lambda > F::zero(), self.factors[i].mu > F::zero());
        }
        rows
    }

    /// Cyclic shift that brings the sign rows to
    /// `(+,+), (−,+), (−,−), (+,−)`; odd shifts swap the λ/μ roles.
    pub fn needed_shift(&self) -> Result<u8, PlanarError> {
        let rows = self.sign_rows();
        let target = [(true, true), (false, true), (false, false), (true, false)];
        for shift in 0..4u8 {
            let ok = (0..4).all(|i| {
                let (l, m) = rows[(i + shift as usize) % 4];
                let row = if shift % 2 == 1 { (m, l) } else { (l, m) };
                row == target[i]
            });
            if ok {
                return Ok(shift);
            }
        }
        Err(PlanarError::NoValidPattern)
    }

    pub fn is_normalized(&self) -> bool {
        self.needed_shift() == Ok(0)
    }
}

/// The signed reduced coefficients
/// `ζᵢ = |νᵢ|/(4√|λᵢμᵢ|)` for `i = 1, 2, 4` and
/// `ζ₃ = ν₃ sgn(ν₁ν₂ν₄)/(4√(λ₃μ₃))`, computed on a normalized arrangement.
pub fn zetas_from_factors<F: Real>(f: &[InvolutionFactors<F>; 4]) -> [F; 4] {
    let four = F::lit(4.0);
    let z_abs = |i: usize| f[i].nu.abs() / (four * (f[i].lambda * f[i].mu).abs().sqrt());
    let sign_nu124 = f[0].nu.signum() * f[1].nu.signum() * f[3].nu.signum();
    let z3 = f[2].nu * sign_nu124 / (four * (f[2].lambda * f[2].mu).sqrt());
    [z_abs(0), z_abs(1), z3, z_abs(3)]
}

/// Re-enumerate the vertices cyclically so that `λ₁, μ₁ > 0` and
/// `λ₃, μ₃ < 0`. Odd shifts exchange the roles of the two base-edge
/// families, which swaps `α ↔ γ`, `λ ↔ μ`, the σ bits, and sends
/// `τ → −τ`. Idempotent; the accumulated shift is recorded in
/// `enumeration`.
pub fn normalize_enumeration<F: Real>(
    spec: &PolyhedronSpec<F>,
) -> Result<PolyhedronSpec<F>, PlanarError> {
    let shift = spec.needed_shift()?;
    // ζ's are data of the normalized system and therefore enumeration
    // invariant; carry them through, computing from the factors only when
    // the spec never had them filled in
    let carried = |zetas: [F; 4], factors: &[InvolutionFactors<F>; 4]| {
        if zetas[0] > F::one() {
            zetas
        } else {
            zetas_from_factors(factors)
        }
    };
    if shift == 0 {
        let mut out = spec.clone();
        out.zetas = carried(spec.zetas, &out.factors);
        return Ok(out);
    }
    let odd = shift % 2 == 1;
    let mut quads = spec.quads;
    let mut factors = spec.factors;
    let mut deltas = spec.base.deltas;
    let mut sig_a = spec.sigma.alpha;
    let mut sig_g = spec.sigma.gamma;
    for i in 0..4 {
        let src = (i + shift as usize) % 4;
        let q = spec.quads[src];
        quads[i] = if odd {
            SphericalQuad { alpha: q.gamma, beta: q.beta, gamma: q.alpha, delta: q.delta }
        } else {
            q
        };
        let f = spec.factors[src];
        factors[i] = if odd {
            InvolutionFactors { lambda: f.mu, mu: f.lambda, nu: f.nu }
        } else {
            f
        };
        deltas[i] = spec.base.deltas[src];
        if odd {
            sig_a[i] = spec.sigma.gamma[src];
            sig_g[i] = spec.sigma.alpha[src];
        } else {
            sig_a[i] = spec.sigma.alpha[src];
            sig_g[i] = spec.sigma.gamma[src];
        }
    }
    let tau = if odd { (-spec.tau).rem_two_pi() } else { spec.tau };
    let out = PolyhedronSpec {
        base: BaseAngles { deltas },
        tau,
        quads,
        factors,
        zetas: carried(spec.zetas, &factors),
        enumeration: (spec.enumeration + shift) % 4,
        sigma: Sigma { alpha: sig_a, gamma: sig_g },
    };
    debug_assert!(out.is_normalized());
    Ok(out)
}

/// Stage reached by a failed construction attempt, ordered by depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FailureStage {
    RcRange,
    Beta,
    Elliptic,
    None,
}

impl FailureStage {
    pub fn as_str(&self) -> &'static str {
        match self {
            FailureStage::RcRange => "RC_RANGE",
            FailureStage::Beta => "BETA",
            FailureStage::Elliptic => "ELLIPTIC",
            FailureStage::None => "NONE",
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConstructError {
    #[error(transparent)]
    Planar(#[from] PlanarError),
    #[error("no valid configuration at τ (deepest stage {stage:?}): {last}")]
    TauRejected { stage: FailureStage, last: PlanarError },
}

/// Run the construction for one τ candidate and a fixed σ assignment.
pub(crate) fn construct_at<F: Real>(
    base: &BaseAngles<F>,
    tau: F,
    sigma_override: Option<Sigma>,
) -> Result<PolyhedronSpec<F>, (FailureStage, PlanarError)> {
    construct_at_xys(base, &deltas_to_xys(base), tau, sigma_override)
}

/// As [`construct_at`], but with the symmetrized parameters given
/// explicitly. The screening path reduces base angles mod 2π per
/// component, which changes the tuple sum and therefore the `(x, y, s)`
/// these angles would re-derive to; the closed forms must be evaluated at
/// the original point (every per-angle trigonometric quantity is mod-2π
/// invariant, the coefficient tables are not).
pub(crate) fn construct_at_xys<F: Real>(
    base: &BaseAngles<F>,
    p: &XYSParams<F>,
    tau: F,
    sigma_override: Option<Sigma>,
) -> Result<PolyhedronSpec<F>, (FailureStage, PlanarError)> {
    let rc = rc_quadruple(tau, p).map_err(|e| (FailureStage::RcRange, e))?;
    let candidates = match sigma_override {
        Some(s) => vec![s],
        None => Sigma::candidates(&rc),
    };
    let mut deepest = (FailureStage::RcRange, PlanarError::NoValidPattern);
    for sigma in candidates {
        match try_assemble(base, tau, &rc, &sigma) {
            Ok(spec) => return Ok(spec),
            Err((stage, e)) => {
                if stage >= deepest.0 {
                    deepest = (stage, e);
                }
            }
        }
    }
    Err(deepest)
}

fn try_assemble<F: Real>(
    base: &BaseAngles<F>,
    tau: F,
    rc: &RCQuadruple<F>,
    sigma: &Sigma,
) -> Result<PolyhedronSpec<F>, (FailureStage, PlanarError)> {
    let quads = recover_angles(base, rc, sigma).map_err(|e| match e {
        PlanarError::BetaUndefined(_) => (FailureStage::Beta, e),
        PlanarError::NotElliptic(_) => (FailureStage::Elliptic, e),
        other => (FailureStage::RcRange, other),
    })?;
    let mut factors = [InvolutionFactors { lambda: F::one(), mu: F::one(), nu: F::one() }; 4];
    for i in 0..4 {
        factors[i] = quads[i]
            .involution_factors()
            .map_err(|e| (FailureStage::Elliptic, PlanarError::Quad(e)))?;
    }
    let spec = PolyhedronSpec {
        base: *base,
        tau,
        quads,
        factors,
        zetas: [F::zero(); 4],
        enumeration: 0,
        sigma: *sigma,
    };
    let shift = spec.needed_shift().map_err(|e| (FailureStage::RcRange, e))?;
    let mut spec = spec;
    // ζ's refer to the normalized arrangement; compute them rationally from
    // the quadruple (ζᵢ² = |Zᵢ|/4), which avoids the angle round trip and
    // keeps ζ₁² − ζ₂² = 1 near machine precision. ζ₃ carries the product
    // sign of the ν's, taken from the assembled factors.
    let zq = z_values(rc, &base.deltas);
    let mut zetas = [F::zero(); 4];
    for (i, z) in zetas.iter_mut().enumerate() {
        *z = zq[(i + shift as usize) % 4].abs().sqrt() / F::two();
    }
    // the defining relations ζ₂ = ζ₄ = √(ζ₁²−1) and ζ₃² = ζ₁² hold up to
    // evaluation noise at this point (the proportionality gate below bounds
    // it); store the projection onto the constraint manifold
    if zetas[0] > F::one() {
        let z2 = (zetas[0] * zetas[0] - F::one()).sqrt();
        zetas[1] = z2;
        zetas[3] = z2;
        zetas[2] = zetas[0];
    }
    let nu_sign_product: F = spec.factors.iter().map(|f| f.nu.signum()).fold(F::one(), |a, b| a * b);
    zetas[2] = zetas[2] * nu_sign_product;
    spec.zetas = zetas;
    if spec.zetas[0] <= F::one() {
        return Err((
            FailureStage::RcRange,
            PlanarError::NotFlexible(spec.zetas[0].to_f64().unwrap_or(f64::NAN)),
        ));
    }
    // assembled factors must satisfy the pairing and proportionality
    // relations to the contract tolerance; ill-conditioned corners of the
    // parameter space that cannot reach it are rejected rather than emitted
    let worst = spec
        .pairing_residuals()
        .iter()
        .chain(spec.proportionality_residuals().iter())
        .fold(F::zero(), |m, r| m.max(r.abs()));
    if worst > F::lit(FACTOR_TOL) {
        return Err((FailureStage::RcRange, PlanarError::NoValidPattern));
    }
    Ok(spec)
}

/// Construct a [`PolyhedronSpec`] from base angles and the parameter `τ`.
///
/// The published convention for `τ` is ambiguous up to the reflections
/// `τ → τ + π` and `τ → π − τ` (same split of the `Z` system, opposite root
/// branch resp. opposite sign of `tan τ`); the candidates are tried in the
/// order `τ, τ+π, π−τ, −τ` and the first fully valid one wins.
pub fn construct_spec<F: Real>(
    base: &BaseAngles<F>,
    tau: F,
    sigma: Option<Sigma>,
) -> Result<PolyhedronSpec<F>, ConstructError> {
    let mut deepest = (FailureStage::RcRange, PlanarError::NoValidPattern);
    for cand in [tau, tau + F::PI(), F::PI() - tau, -tau] {
        match construct_at(base, cand.rem_two_pi(), sigma) {
            Ok(spec) => return Ok(spec),
            Err((stage, e)) => {
                if stage >= deepest.0 {
                    deepest = (stage, e);
                }
            }
        }
    }
    Err(ConstructError::TauRejected { stage: deepest.0, last: deepest.1 })
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

/// On-disk form of a [`PolyhedronSpec`]. `alpha` and `gamma` are written as
/// their principal values in `(0, π)`; the `(π, 2π)` branch is recorded by
/// the corresponding σ bit and restored on load.
#[derive(Serialize, Deserialize)]
struct SpecJson<F> {
    deltas: [F; 4],
    tau: F,
    vertices: [VertexJson<F>; 4],
    zetas: [F; 4],
    enumeration: u8,
    sigma: Sigma,
}

#[derive(Serialize, Deserialize)]
struct VertexJson<F> {
    alpha: F,
    beta: F,
    gamma: F,
    delta: F,
    lambda: F,
    mu: F,
    nu: F,
}

/// Fold an angle from `(π, 2π)` back to its `(0, π)` principal value.
fn fold<F: Real>(v: F) -> F {
    if v > F::PI() {
        v - F::PI()
    } else {
        v
    }
}

pub fn spec_to_json<F: Real + Serialize>(spec: &PolyhedronSpec<F>) -> String {
    let vertices = std::array::from_fn(|i| {
        let q = &spec.quads[i];
        let f = &spec.factors[i];
        VertexJson {
            alpha: fold(q.alpha),
            beta: q.beta,
            gamma: fold(q.gamma),
            delta: q.delta,
            lambda: f.lambda,
            mu: f.mu,
            nu: f.nu,
        }
    });
    let dto = SpecJson {
        deltas: spec.base.deltas,
        tau: spec.tau,
        vertices,
        zetas: spec.zetas,
        enumeration: spec.enumeration,
        sigma: spec.sigma,
    };
    let mut out = serde_json::to_string_pretty(&dto).expect("spec serializes");
    out.push('\n');
    out
}

pub fn spec_from_json<F: Real + for<'de> Deserialize<'de>>(
    text: &str,
) -> Result<PolyhedronSpec<F>, serde_json::Error> {
    let dto: SpecJson<F> = serde_json::from_str(text)?;
    let unfold = |v: F, sign: i8| if sign < 0 { v + F::PI() } else { v };
    let quads = std::array::from_fn(|i| {
        let v = &dto.vertices[i];
        SphericalQuad {
            alpha: unfold(v.alpha, dto.sigma.alpha[i]),
            beta: v.beta,
            gamma: unfold(v.gamma, dto.sigma.gamma[i]),
            delta: v.delta,
        }
    });
    let factors = std::array::from_fn(|i| {
        let v = &dto.vertices[i];
        InvolutionFactors { lambda: v.lambda, mu: v.mu, nu: v.nu }
    });
    Ok(PolyhedronSpec {
        base: BaseAngles { deltas: dto.deltas },
        tau: dto.tau,
        quads,
        factors,
        zetas: dto.zetas,
        enumeration: dto.enumeration,
        sigma: dto.sigma,
    })
}
