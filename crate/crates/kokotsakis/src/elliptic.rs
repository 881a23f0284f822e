//! Jacobi elliptic functions and the elliptic parameterization of the
//! flexion.
//!
//! The same configuration curve traced in elementary functions by
//! [`crate::flexion::flexion_elementary`] is traced by shifted elliptic
//! sines with modulus `k = (ζ₁ − √(ζ₁²−1))²`. Every shifted evaluation
//! `sn(nK + m·iK′/2 + it)` reduces, through the Jacobi imaginary
//! transformation, to a real-valued expression in functions of the
//! complementary modulus `k′` at real argument `t`, so no complex arithmetic
//! is needed.

use crate::flexion::{Branch, FlexionSample, ReducedCoeffs};
use crate::planar::PolyhedronSpec;
use crate::{Proj, Real};

/// AGM iteration floor.
const AGM_TOL: f64 = 1e-15;
/// Below this modulus the elliptic functions are evaluated by their
/// trigonometric limits; the error is O(k²).
const SMALL_MODULUS: f64 = 1e-7;

/// Complete elliptic integral of the first kind `K(k)` (modulus convention)
/// via the arithmetic-geometric mean.
pub fn complete_k<F: Real>(k: F) -> F {
    let mut a = F::one();
    let mut b = (F::one() - k * k).max(F::zero()).sqrt();
    while (a - b).abs() > F::lit(AGM_TOL) * a {
        let an = (a + b) / F::two();
        b = (a * b).sqrt();
        a = an;
    }
    F::FRAC_PI_2() / a
}

/// `K(k)` by descending Landen recursion, an independent route used to
/// cross-check the AGM value.
pub fn complete_k_landen<F: Real>(k: F) -> F {
    if k < F::lit(1e-6) {
        let m = k * k;
        return F::FRAC_PI_2()
            * (F::one() + m / F::lit(4.0) + F::lit(9.0 / 64.0) * m * m);
    }
    let kp = (F::one() - k * k).max(F::zero()).sqrt();
    let k1 = (F::one() - kp) / (F::one() + kp);
    (F::one() + k1) * complete_k_landen(k1)
}

/// Jacobi `sn, cn, dn` with modulus `k ∈ [0, 1)`, by the descending
/// arithmetic-geometric mean with backward phi recursion.
pub fn sn_cn_dn<F: Real>(u: F, k: F) -> (F, F, F) {
    if k < F::lit(SMALL_MODULUS) {
        let (s, c) = u.sin_cos();
        return (s, c, F::one() - k * k * s * s / F::two());
    }
    let kp2 = F::one() - k * k;
    if kp2 < F::lit(1e-14) {
        let s = u.tanh();
        let c = F::one() / u.cosh();
        return (s, c, c);
    }
    let mut a_seq = [F::zero(); 64];
    let mut c_seq = [F::zero(); 64];
    a_seq[0] = F::one();
    c_seq[0] = k;
    let mut b = kp2.sqrt();
    let mut n = 0usize;
    while c_seq[n].abs() > F::lit(AGM_TOL) * a_seq[n] && n < 62 {
        a_seq[n + 1] = (a_seq[n] + b) / F::two();
        c_seq[n + 1] = (a_seq[n] - b) / F::two();
        b = (a_seq[n] * b).sqrt();
        n += 1;
    }
    let mut phi = F::lit((1u64 << n) as f64) * a_seq[n] * u;
    for i in (1..=n).rev() {
        let arg = (c_seq[i] / a_seq[i] * phi.sin()).max(-F::one()).min(F::one());
        phi = (phi + arg.asin()) / F::two();
    }
    let (sn, cn) = phi.sin_cos();
    let dn = (F::one() - k * k * sn * sn).max(F::zero()).sqrt();
    (sn, cn, dn)
}

/// Modulus data for the elliptic parameterization.
#[derive(Clone, Copy, Debug)]
pub struct EllipticModulus<F> {
    pub k: F,
    pub k_prime: F,
    /// `K(k)`
    pub big_k: F,
    /// `K(k′)`
    pub big_k_prime: F,
}

/// `k = (ζ₁ − √(ζ₁²−1))²`, evaluated through the reciprocal form so large
/// `ζ₁` loses no precision. Requires `ζ₁ > 1`.
pub fn modulus_from_zeta<F: Real>(zeta1: F) -> EllipticModulus<F> {
    assert!(zeta1 > F::one(), "elliptic modulus needs ζ₁ > 1");
    let root = zeta1 + (zeta1 * zeta1 - F::one()).sqrt();
    let k = F::one() / (root * root);
    let k_prime = ((F::one() - k) * (F::one() + k)).sqrt();
    EllipticModulus { k, k_prime, big_k: complete_k(k), big_k_prime: complete_k(k_prime) }
}

/// Value of a quarter-period-shifted elliptic sine: real, purely imaginary,
/// or the projective pole value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QuarterShiftValue<F> {
    Real(F),
    Imaginary(F),
    /// A pole of `sn`; the configuration-space meaning is the point at
    /// infinity of the corresponding coordinate.
    Infinity,
}

/// Evaluate `sn(nK + m·(iK′/2) + i t, k)` for `n ∈ 0..4`, `m ∈ 0..3`,
/// reduced to real Jacobi functions of the complementary modulus.
pub fn quarter_shift_eval<F: Real>(n: u8, m: u8, t: F, md: &EllipticModulus<F>) -> QuarterShiftValue<F> {
    let (sn, cn, dn) = sn_cn_dn(t, md.k_prime);
    let k = md.k;
    let ratio = |num: F, den: F| {
        if den.abs() < F::lit(1e-300) {
            QuarterShiftValue::Infinity
        } else {
            QuarterShiftValue::Real(num / den)
        }
    };
    let iratio = |num: F, den: F| {
        if den.abs() < F::lit(1e-300) {
            QuarterShiftValue::Infinity
        } else {
            QuarterShiftValue::Imaginary(num / den)
        }
    };
    match (n % 4, m % 3) {
        // sn(it) = i·sc(t, k′) and shifts by K: 1/dn, alternating signs
        (0, 0) => iratio(sn, cn),
        (1, 0) => ratio(F::one(), dn),
        (2, 0) => iratio(-sn, cn),
        (3, 0) => ratio(-F::one(), dn),
        // shift by iK′: sn(u + iK′) = 1/(k·sn u)
        (0, 2) => iratio(-cn, k * sn),
        (1, 2) => ratio(dn, k),
        (2, 2) => iratio(cn, k * sn),
        (3, 2) => ratio(-dn, k),
        // half shift iK′/2
        (n4, 1) if n4 % 2 == 1 => {
            let kp2 = md.k_prime * md.k_prime;
            let num = (F::one() + k) * dn + kp2 * sn * cn;
            let den = k.sqrt() * (dn * dn + k);
            let v = num / den;
            QuarterShiftValue::Real(if n4 == 1 { v } else { -v })
        }
        (n4, _) => {
            let (s2, c2, _) = sn_cn_dn(t + md.big_k_prime / F::two(), md.k_prime);
            if c2.abs() < F::lit(1e-300) {
                QuarterShiftValue::Infinity
            } else {
                let v = s2 / c2;
                QuarterShiftValue::Imaginary(if n4 == 0 { v } else { -v })
            }
        }
    }
}

/// The elliptic-sine parameterization of the configuration curve at
/// `t ∈ [0, 2K′)`; every sample satisfies the coupling system.
///
/// Branch selection: `sigma` is the simultaneous ±; together with the ν
/// signs it picks the quarter-period shift `2K` or `iK′` for `u` and
/// `iK′/2` or `2K − iK′/2` for `w₂`.
pub fn flexion_elliptic<F: Real>(
    rc: &ReducedCoeffs<F>,
    md: &EllipticModulus<F>,
    branch: Branch,
    t: F,
) -> FlexionSample<F> {
    let k = md.k;
    let sqrt_k = k.sqrt();
    let (sn, cn, dn) = sn_cn_dn(t, md.k_prime);
    let rho: F = branch.rho.factor();
    let sig: F = branch.sigma.factor();
    let s1 = rc.sgn_nu[0].factor::<F>();
    let s4 = rc.sgn_nu[3].factor::<F>();
    let s12 = rc.s12();
    let s34 = rc.s34();

    // z = sgn ν₁ √(λ₁ k) sn(K + it) = sgn ν₁ √(λ₁ k) / dn(t, k′)
    let z = Proj::new(rho * s1 * rc.sqrt_lambda1 * sqrt_k, dn);
    // w₁ = √(μ₁ k) sn(K + iK′/2 + it)
    let kp2 = md.k_prime * md.k_prime;
    let w1 = Proj::new(
        rho * rc.sqrt_mu1 * ((F::one() + k) * dn + kp2 * sn * cn),
        dn * dn + k,
    );
    // u: shift 2K (±sgn(ν₁ν₂) = +) or iK′ (−)
    let u = if sig * s12 > F::zero() {
        Proj::new(rho * s4 * rc.sqrt_neg_lambda3 * sqrt_k * sn, cn)
    } else {
        Proj::new(rho * s4 * rc.sqrt_neg_lambda3 / sqrt_k * cn, sn)
    };
    // w₂: shift iK′/2 (∓sgn(ν₃ν₄) resolving to +) or 2K − iK′/2 (−)
    let w2 = if sig * s34 > F::zero() {
        let (s2, c2, _) = sn_cn_dn(t + md.big_k_prime / F::two(), md.k_prime);
        Proj::new(-rho * s12 * rc.sqrt_neg_mu3 * sqrt_k * s2, c2)
    } else {
        let (s2, c2, _) = sn_cn_dn(t - md.big_k_prime / F::two(), md.k_prime);
        Proj::new(rho * s12 * rc.sqrt_neg_mu3 * sqrt_k * s2, c2)
    };

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

/// Distance of two angles on the circle.
pub fn circular_distance<F: Real>(a: F, b: F) -> F {
    let d = (a - b).rem_two_pi();
    d.min(F::tau_full() - d)
}

/// Result of fitting the linear reparameterization `u = −(K′/π)·t + shift`
/// between the elementary and elliptic parameterizations.
#[derive(Clone, Copy, Debug)]
pub struct AlignmentFit<F> {
    pub shift: F,
    /// Max circular distance over all four dihedral-angle curves at the
    /// fitted shift.
    pub max_diff: F,
    pub branch_elliptic: Branch,
}

/// Fit the additive shift by one-dimensional least squares (the scale is
/// pinned to `−K′/π` by the period match), trying the elliptic branches
/// against the elementary branch `(+,+)`, and report the max deviation.
pub fn fit_alignment<F: Real>(
    spec: &PolyhedronSpec<F>,
    samples: usize,
) -> Result<AlignmentFit<F>, crate::planar::PlanarError> {
    let rc = crate::flexion::reduce(spec)?;
    let md = modulus_from_zeta(rc.zeta1());
    let elem_branch = Branch::ALL[0];
    let ts: Vec<F> = (0..samples)
        .map(|i| F::tau_full() * F::from_usize(i).unwrap() / F::from_usize(samples).unwrap())
        .collect();
    let elem: Vec<[F; 4]> = ts
        .iter()
        .map(|&t| crate::flexion::flexion_elementary(&rc, elem_branch, t).dihedrals())
        .collect();
    let period = F::two() * md.big_k_prime;
    let scale = -md.big_k_prime / F::PI();

    let mod_period = |v: F| {
        let u = v % period;
        if u < F::zero() {
            u + period
        } else {
            u
        }
    };
    let sq_err = |shift: F, branch: Branch| -> F {
        let mut acc = F::zero();
        for (i, &t) in ts.iter().enumerate() {
            let e = flexion_elliptic(&rc, &md, branch, mod_period(scale * t + shift)).dihedrals();
            for j in 0..4 {
                let d = circular_distance(elem[i][j], e[j]);
                acc = acc + d * d;
            }
        }
        acc
    };
    let max_err = |shift: F, branch: Branch| -> F {
        let mut worst = F::zero();
        for (i, &t) in ts.iter().enumerate() {
            let e = flexion_elliptic(&rc, &md, branch, mod_period(scale * t + shift)).dihedrals();
            for j in 0..4 {
                worst = worst.max(circular_distance(elem[i][j], e[j]));
            }
        }
        worst
    };

    let mut best: Option<AlignmentFit<F>> = None;
    let coarse = 96;
    for branch in Branch::ALL {
        let mut best_shift = F::zero();
        let mut best_val = F::infinity();
        for i in 0..coarse {
            let c = period * F::from_usize(i).unwrap() / F::from_usize(coarse).unwrap();
            let v = sq_err(c, branch);
            if v < best_val {
                best_val = v;
                best_shift = c;
            }
        }
        let step = period / F::from_usize(coarse).unwrap();
        let (mut lo, mut hi) = (best_shift - step, best_shift + step);
        for _ in 0..60 {
            let third = (hi - lo) / F::lit(3.0);
            let (c1, c2) = (lo + third, hi - third);
            if sq_err(c1, branch) < sq_err(c2, branch) {
                hi = c2;
            } else {
                lo = c1;
            }
        }
        let shift = (lo + hi) / F::two();
        let fit = AlignmentFit { shift, max_diff: max_err(shift, branch), branch_elliptic: branch };
        if best.as_ref().map_or(true, |b| fit.max_diff < b.max_diff) {
            best = Some(fit);
        }
    }
    Ok(best.expect("at least one branch"))
}
