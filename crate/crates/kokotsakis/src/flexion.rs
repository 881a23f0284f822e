//! The configuration space and its elementary-function parameterization.
//!
//! After rescaling by `√|λ|, √|μ|` and the ν signs, the four coupling
//! equations reduce to a system in `(f₁, g₁, f₃, g₃)` whose first equation
//! `(f₁²+1)(g₁²+1) = 4ζ₁ f₁ g₁` has solutions exactly when `ζ₁ > 1`. The
//! solution curve is parameterized by
//! `F(t) = sin t √(ζ₁−1) + √(1+(ζ₁−1) sin²t)` together with its shifted
//! variants, and the remaining variables follow from palindromic quadratics
//! whose two roots are mutual reciprocals — evaluated projectively so the
//! flattening values `0` and `∞` are ordinary points.

use crate::planar::{normalize_enumeration, PlanarError, PolyhedronSpec};
use crate::{Proj, Real};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor<F: Real>(&self) -> F {
        match self {
            Sign::Plus => F::one(),
            Sign::Minus => -F::one(),
        }
    }

    pub fn of<F: Real>(v: F) -> Self {
        if v >= F::zero() {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn as_char(&self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl std::str::FromStr for Sign {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "+" | "+1" | "1" => Ok(Sign::Plus),
            "-" | "-1" => Ok(Sign::Minus),
            other => Err(format!("expected '+' or '-', got {other:?}")),
        }
    }
}

/// One of the four solution branches: `sigma` is the simultaneous ± in the
/// closed forms for `u` and `w₂`, `rho` the global reflection
/// `(z, w₁, u, w₂) → −(z, w₁, u, w₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    pub sigma: Sign,
    pub rho: Sign,
}

impl Branch {
    pub const ALL: [Branch; 4] = [
        Branch { sigma: Sign::Plus, rho: Sign::Plus },
        Branch { sigma: Sign::Plus, rho: Sign::Minus },
        Branch { sigma: Sign::Minus, rho: Sign::Plus },
        Branch { sigma: Sign::Minus, rho: Sign::Minus },
    ];
}

/// Scaled coefficients and sign data of the reduced system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedCoeffs<F> {
    /// `ζ₁, ζ₂, ζ₄ > 0`; `ζ₃` carries the sign `sgn(ν₃ν₁ν₂ν₄)`.
    pub zeta: [F; 4],
    /// Signs of `ν₁..ν₄` in the normalized enumeration.
    pub sgn_nu: [Sign; 4],
    pub sqrt_lambda1: F,
    pub sqrt_mu1: F,
    pub sqrt_neg_lambda3: F,
    pub sqrt_neg_mu3: F,
}

impl<F: Real> ReducedCoeffs<F> {
    pub fn zeta1(&self) -> F {
        self.zeta[0]
    }

    fn s1(&self) -> F {
        self.sgn_nu[0].factor()
    }

    fn s4(&self) -> F {
        self.sgn_nu[3].factor()
    }

    pub fn s12(&self) -> F {
        self.sgn_nu[0].factor::<F>() * self.sgn_nu[1].factor::<F>()
    }

    pub fn s34(&self) -> F {
        self.sgn_nu[2].factor::<F>() * self.sgn_nu[3].factor::<F>()
    }
}

/// Scale the normalized factors into the reduced system. Fails with
/// `NotFlexible` when `ζ₁ ≤ 1`, the threshold below which the configuration
/// space has no one-parameter real branch.
pub fn reduce<F: Real>(spec: &PolyhedronSpec<F>) -> Result<ReducedCoeffs<F>, PlanarError> {
    let spec = normalize_enumeration(spec)?;
    let f = &spec.factors;
    let zeta = crate::planar::zetas_from_factors(f);
    if !(zeta[0] > F::one()) {
        return Err(PlanarError::NotFlexible(zeta[0].to_f64().unwrap_or(f64::NAN)));
    }
    Ok(ReducedCoeffs {
        zeta,
        sgn_nu: [
            Sign::of(f[0].nu),
            Sign::of(f[1].nu),
            Sign::of(f[2].nu),
            Sign::of(f[3].nu),
        ],
        sqrt_lambda1: f[0].lambda.sqrt(),
        sqrt_mu1: f[0].mu.sqrt(),
        sqrt_neg_lambda3: (-f[2].lambda).sqrt(),
        sqrt_neg_mu3: (-f[2].mu).sqrt(),
    })
}

/// `F(t) = sin t √(ζ₁−1) + √(1+(ζ₁−1) sin²t)`, strictly positive.
pub fn f_of<F: Real>(t: F, zeta1: F) -> F {
    let a = zeta1 - F::one();
    let s = t.sin();
    s * a.sqrt() + (F::one() + a * s * s).sqrt()
}

/// `G(t) = sin t √(1+(ζ₁−1) sin²t)`.
pub fn g_of<F: Real>(t: F, zeta1: F) -> F {
    let a = zeta1 - F::one();
    let s = t.sin();
    s * (F::one() + a * s * s).sqrt()
}

/// `V(t) = sin t √(1+(ζ₁−1) cos²t)`.
pub fn v_of<F: Real>(t: F, zeta1: F) -> F {
    let a = zeta1 - F::one();
    let c = t.cos();
    t.sin() * (F::one() + a * c * c).sqrt()
}

/// One configuration point: the parameter, the four tangent half-angle
/// coordinates on `RP¹` and the corresponding dihedral angles.
#[derive(Clone, Copy, Debug)]
pub struct FlexionSample<F> {
    pub t: F,
    pub z: Proj<F>,
    pub w1: Proj<F>,
    pub u: Proj<F>,
    pub w2: Proj<F>,
    pub phi: F,
    pub psi1: F,
    pub theta: F,
    pub psi2: F,
    pub branch: Branch,
}

impl<F: Real> FlexionSample<F> {
    fn from_coords(t: F, branch: Branch, z: Proj<F>, w1: Proj<F>, u: Proj<F>, w2: Proj<F>) -> Self {
        FlexionSample {
            t,
            z,
            w1,
            u,
            w2,
            phi: z.angle(),
            psi1: w1.angle(),
            theta: u.angle(),
            psi2: w2.angle(),
            branch,
        }
    }

    pub fn dihedrals(&self) -> [F; 4] {
        [self.phi, self.psi1, self.theta, self.psi2]
    }
}

/// Stable projective value of
/// `[√(ζ₁+1) + sign·(G(t)+G(t+shift))] / [V(t) − V(t+shift)]`.
///
/// The two sign branches are the roots of a palindromic quadratic, so their
/// product is 1 and the numerators satisfy `n₊ n₋ = d²` identically. Near a
/// flattening event one numerator cancels against the denominator; the
/// representative is therefore taken from whichever side is well scaled.
fn stable_branch_pair<F: Real>(zeta1: F, sign: F, shift: F, t: F) -> Proj<F> {
    let gsum = g_of(t, zeta1) + g_of(t + shift, zeta1);
    let d = v_of(t, zeta1) - v_of(t + shift, zeta1);
    let root = (zeta1 + F::one()).sqrt();
    let n_this = root + sign * gsum;
    let n_other = root - sign * gsum;
    if n_this.abs() >= n_other.abs() {
        Proj::new(n_this, d)
    } else {
        Proj::new(d, n_other)
    }
}

/// The four tangent half-angle coordinates of the elementary-function
/// parameterization at parameter `t ∈ [0, 2π)` on the given branch.
pub fn flexion_elementary<F: Real>(rc: &ReducedCoeffs<F>, branch: Branch, t: F) -> FlexionSample<F> {
    let z1 = rc.zeta1();
    let rho: F = branch.rho.factor();
    let sig: F = branch.sigma.factor();
    let half_pi = F::FRAC_PI_2();

    let z = Proj::from_real(rho * rc.s1() * rc.sqrt_lambda1 * f_of(t, z1) * f_of(t + half_pi, z1));
    let w1 = Proj::from_real(rho * rc.sqrt_mu1 * f_of(t, z1) * f_of(t - half_pi, z1));

    let f3 = stable_branch_pair(z1, sig, half_pi, t);
    let u = Proj::new(rho * rc.s4() * rc.sqrt_neg_lambda3 * f3.num, f3.den);

    let g3 = stable_branch_pair(z1, sig * rc.s12() * rc.s34(), -half_pi, t);
    let w2 = Proj::new(rho * rc.s12() * rc.sqrt_neg_mu3 * g3.num, g3.den);

    FlexionSample::from_coords(t, branch, z, w1, u, w2)
}

/// Hyperbolic coordinates on the first reduced equation:
/// `X = log(f₁/g₁) = 2 arcsinh(ϱ cos t)`, `Y = log(f₁ g₁) = 2 arcsinh(ϱ sin t)`
/// with `ϱ = √2 sinh(ω/2)`, `ω = arccosh ζ₁`, so that
/// `cosh X + cosh Y = 2ζ₁` along the whole curve.
pub fn cosh_coordinates<F: Real>(rc: &ReducedCoeffs<F>, t: F) -> (F, F) {
    let omega = rc.zeta1().acosh_();
    let rho = F::two().sqrt() * ((omega / F::two()).exp() - (-omega / F::two()).exp()) / F::two();
    let x = F::two() * (rho * t.cos()).asinh_();
    let y = F::two() * (rho * t.sin()).asinh_();
    (x, y)
}

/// Base edge whose dihedral angle reaches 0 or π at a flattening event.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlattenedEdge {
    /// `g₁ = 1` forces `f₃ ∈ {0, ∞}`: the θ edge flattens.
    Theta,
    /// `f₁ = 1` forces `g₃ ∈ {0, ∞}`: the ψ₂ edge flattens.
    Psi2,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlatteningEvent<F> {
    pub t: F,
    pub edge: FlattenedEdge,
}

/// The four parameter values where flattening occurs. `φ` and `ψ₁` never
/// flatten: `|log f₁|` and `|log g₁|` stay below `arccosh(2ζ₁ − 1)`.
pub fn flattening_parameters<F: Real>(_rc: &ReducedCoeffs<F>) -> [FlatteningEvent<F>; 4] {
    let q = F::FRAC_PI_4();
    [
        FlatteningEvent { t: q, edge: FlattenedEdge::Theta },
        FlatteningEvent { t: F::lit(3.0) * q, edge: FlattenedEdge::Psi2 },
        FlatteningEvent { t: F::lit(5.0) * q, edge: FlattenedEdge::Theta },
        FlatteningEvent { t: F::lit(7.0) * q, edge: FlattenedEdge::Psi2 },
    ]
}

/// The coupling coefficients of the polynomial system in the normalized
/// enumeration, for residual evaluation.
#[derive(Clone, Copy, Debug)]
pub struct SystemCoeffs<F> {
    pub lambda1: F,
    pub mu1: F,
    pub lambda3: F,
    pub mu3: F,
    pub nu: [F; 4],
}

impl<F: Real> SystemCoeffs<F> {
    pub fn from_spec(spec: &PolyhedronSpec<F>) -> Result<Self, PlanarError> {
        let spec = normalize_enumeration(spec)?;
        let f = &spec.factors;
        Ok(SystemCoeffs {
            lambda1: f[0].lambda,
            mu1: f[0].mu,
            lambda3: f[2].lambda,
            mu3: f[2].mu,
            nu: [f[0].nu, f[1].nu, f[2].nu, f[3].nu],
        })
    }

    /// The four homogenized residuals of the coupling system, evaluated on
    /// unit-norm coordinate pairs so the scale is meaningful at infinity.
    pub fn residuals(&self, sample: &FlexionSample<F>) -> [F; 4] {
        let z = sample.z.unit();
        let w1 = sample.w1.unit();
        let u = sample.u.unit();
        let w2 = sample.w2.unit();
        let quad = |lam: F, mu: F, nu: F, (a0, a1): (F, F), (b0, b1): (F, F)| {
            (a0 * a0 + lam * a1 * a1) * (b0 * b0 + mu * b1 * b1) - nu * a0 * a1 * b0 * b1
        };
        [
            quad(self.lambda1, self.mu1, self.nu[0], z, w1),
            quad(-self.lambda1, -self.mu3, self.nu[1], z, w2),
            quad(self.lambda3, self.mu3, self.nu[2], u, w2),
            quad(-self.lambda3, -self.mu1, self.nu[3], u, w1),
        ]
    }
}

/// Convenience wrapper: residuals of the main system for a sample, using the
/// spec's normalized factors.
pub fn residual_main<F: Real>(
    spec: &PolyhedronSpec<F>,
    sample: &FlexionSample<F>,
) -> Result<[F; 4], PlanarError> {
    Ok(SystemCoeffs::from_spec(spec)?.residuals(sample))
}

/// Format a flexion CSV row: `t,phi,psi1,theta,psi2,branch_sigma,branch_rho`
/// with 12 significant digits.
pub fn csv_row<F: Real>(s: &FlexionSample<F>) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        fmt12(s.t),
        fmt12(s.phi),
        fmt12(s.psi1),
        fmt12(s.theta),
        fmt12(s.psi2),
        s.branch.sigma.as_char(),
        s.branch.rho.as_char()
    )
}

pub const CSV_HEADER: &str = "t,phi,psi1,theta,psi2,branch_sigma,branch_rho";

/// 12 significant digits, deterministic.
pub fn fmt12<F: Real>(v: F) -> String {
    format!("{:.11e}", v.to_f64().unwrap_or(f64::NAN))
}
