//! Biquadratic resultants, their factorization, and branch sets.
//!
//! Eliminating the shared variable from two coupling equations gives a
//! degree-(4,4) polynomial in the two remaining tangent half-angle
//! variables. For the reduced coupling pair its quartic factors exactly when
//! `ζ₁² − ζ₂² = 1`, and the branch sets of the two eliminated projections
//! coincide under the same relation — the numerical content of the
//! reducibility claim.

use crate::planar::{normalize_enumeration, PlanarError, PolyhedronSpec};
use crate::sphquad::InvolutionFactors;
use crate::Real;
use num_complex::Complex;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ResultantError {
    #[error("both leading z² coefficient rows vanish")]
    DegenerateLeading,
}

/// `a₂₂ z²w² + a₂₀ z² + a₀₂ w² + 2a₁₁ zw + a₀₀`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Biquadratic<F> {
    pub a22: F,
    pub a20: F,
    pub a02: F,
    pub a11: F,
    pub a00: F,
}

impl<F: Real> Biquadratic<F> {
    /// The coupling polynomial `(z² + λ)(w² + μ) − ν z w`.
    pub fn from_factors(lambda: F, mu: F, nu: F) -> Self {
        Biquadratic { a22: F::one(), a20: mu, a02: lambda, a11: -nu / F::two(), a00: lambda * mu }
    }

    pub fn eval(&self, z: F, w: F) -> F {
        self.a22 * z * z * w * w
            + self.a20 * z * z
            + self.a02 * w * w
            + F::two() * self.a11 * z * w
            + self.a00
    }

    /// Coefficients `(A, B, C)` of the polynomial read as `A z² + B z + C`
    /// with `A, B, C` quadratics in `w` (each returned as `[c0, c1, c2]`).
    fn as_quadratic_in_z(&self) -> [[F; 3]; 3] {
        [
            [self.a20, F::zero(), self.a22],
            [F::zero(), F::two() * self.a11, F::zero()],
            [self.a00, F::zero(), self.a02],
        ]
    }
}

/// Dense coefficient grid of a polynomial in two variables of degree ≤ 4 in
/// each; `c[i][j]` multiplies `w₁^i w₂^j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolyGrid<F> {
    pub c: [[F; 5]; 5],
}

impl<F: Real> PolyGrid<F> {
    pub fn zero() -> Self {
        PolyGrid { c: [[F::zero(); 5]; 5] }
    }

    pub fn eval(&self, w1: F, w2: F) -> F {
        let mut acc = F::zero();
        let mut p1 = F::one();
        for i in 0..5 {
            let mut p2 = F::one();
            for j in 0..5 {
                acc = acc + self.c[i][j] * p1 * p2;
                p2 = p2 * w2;
            }
            p1 = p1 * w1;
        }
        acc
    }

    pub fn max_abs(&self) -> F {
        self.c.iter().flatten().fold(F::zero(), |m, v| m.max(v.abs()))
    }

    /// Scale so the largest coefficient has magnitude 1.
    pub fn normalized(&self) -> Self {
        let m = self.max_abs();
        if m == F::zero() {
            return *self;
        }
        let mut out = *self;
        for row in out.c.iter_mut() {
            for v in row.iter_mut() {
                *v = *v / m;
            }
        }
        out
    }

    /// Largest coefficient difference after max-normalizing both grids,
    /// matching overall sign.
    pub fn proportionality_deviation(&self, other: &Self) -> F {
        let a = self.normalized();
        let mut b = other.normalized();
        // align signs on the largest entry of `a`
        let (mut bi, mut bj) = (0, 0);
        let mut best = F::zero();
        for i in 0..5 {
            for j in 0..5 {
                if a.c[i][j].abs() > best {
                    best = a.c[i][j].abs();
                    (bi, bj) = (i, j);
                }
            }
        }
        if a.c[bi][bj] * b.c[bi][bj] < F::zero() {
            for row in b.c.iter_mut() {
                for v in row.iter_mut() {
                    *v = -*v;
                }
            }
        }
        let mut dev = F::zero();
        for i in 0..5 {
            for j in 0..5 {
                dev = dev.max((a.c[i][j] - b.c[i][j]).abs());
            }
        }
        dev
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero();
        for i in 0..5 {
            for j in 0..5 {
                out.c[j][i] = self.c[i][j];
            }
        }
        out
    }
}

fn umul<F: Real>(a: &[F; 3], b: &[F; 3]) -> [F; 5] {
    let mut out = [F::zero(); 5];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = out[i + j] + x * y;
        }
    }
    out
}

fn add_outer<F: Real>(grid: &mut PolyGrid<F>, sign: F, u: &[F; 5], v: &[F; 5]) {
    for i in 0..5 {
        for j in 0..5 {
            grid.c[i][j] = grid.c[i][j] + sign * u[i] * v[j];
        }
    }
}

/// Sylvester resultant eliminating `z` from `p(z, w₁)` and `q(z, w₂)`:
/// a degree-(4,4) polynomial in `(w₁, w₂)`.
///
/// For two quadratics in `z` the determinant collapses to
/// `(A_p C_q − C_p A_q)² − (A_p B_q − B_p A_q)(B_p C_q − C_p B_q)`,
/// every term of which is a separable product of a quartic in `w₁` and a
/// quartic in `w₂`.
pub fn resultant_z<F: Real>(
    p: &Biquadratic<F>,
    q: &Biquadratic<F>,
) -> Result<PolyGrid<F>, ResultantError> {
    let tiny = F::lit(1e-300);
    if (p.a22.abs() < tiny && p.a20.abs() < tiny) || (q.a22.abs() < tiny && q.a20.abs() < tiny) {
        return Err(ResultantError::DegenerateLeading);
    }
    let [pa, pb, pc] = p.as_quadratic_in_z();
    let [qa, qb, qc] = q.as_quadratic_in_z();
    let mut grid = PolyGrid::zero();
    // (A_p C_q − C_p A_q)²
    add_outer(&mut grid, F::one(), &umul(&pa, &pa), &umul(&qc, &qc));
    add_outer(&mut grid, -F::two(), &umul(&pa, &pc), &umul(&qc, &qa));
    add_outer(&mut grid, F::one(), &umul(&pc, &pc), &umul(&qa, &qa));
    // −(A_p B_q − B_p A_q)(B_p C_q − C_p B_q)
    add_outer(&mut grid, -F::one(), &umul(&pa, &pb), &umul(&qb, &qc));
    add_outer(&mut grid, F::one(), &umul(&pa, &pc), &umul(&qb, &qb));
    add_outer(&mut grid, F::one(), &umul(&pb, &pb), &umul(&qa, &qc));
    add_outer(&mut grid, -F::one(), &umul(&pb, &pc), &umul(&qa, &qb));
    Ok(grid)
}

/// Numeric 4×4 Sylvester determinant at a sample point, used as an
/// independent route against [`resultant_z`].
pub fn sylvester_det_at<F: Real>(p: &Biquadratic<F>, q: &Biquadratic<F>, w1: F, w2: F) -> F {
    let eval3 = |c: &[F; 3], w: F| c[0] + c[1] * w + c[2] * w * w;
    let [pa, pb, pc] = p.as_quadratic_in_z();
    let [qa, qb, qc] = q.as_quadratic_in_z();
    let (a2, a1, a0) = (eval3(&pa, w1), eval3(&pb, w1), eval3(&pc, w1));
    let (b2, b1, b0) = (eval3(&qa, w2), eval3(&qb, w2), eval3(&qc, w2));
    let m = [
        [a2, a1, a0, F::zero()],
        [F::zero(), a2, a1, a0],
        [b2, b1, b0, F::zero()],
        [F::zero(), b2, b1, b0],
    ];
    det4(&m)
}

fn det4<F: Real>(m: &[[F; 4]; 4]) -> F {
    let det3 = |m: [[F; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let mut acc = F::zero();
    let mut sign = F::one();
    for col in 0..4 {
        let mut minor = [[F::zero(); 3]; 3];
        for r in 1..4 {
            let mut cc = 0;
            for c in 0..4 {
                if c != col {
                    minor[r - 1][cc] = m[r][c];
                    cc += 1;
                }
            }
        }
        acc = acc + sign * m[0][col] * det3(minor);
        sign = -sign;
    }
    acc
}

/// The reduced coupling pair in `(f₁, g₁)` and `(f₁, g₃)`:
/// `(f₁²+1)(g₁²+1) = 4ζ₁f₁g₁` and `(f₁²−1)(g₃²+1) = 4ζ₂f₁g₃`.
pub fn reduced_pair<F: Real>(zeta1: F, zeta2: F) -> (Biquadratic<F>, Biquadratic<F>) {
    (
        Biquadratic {
            a22: F::one(),
            a20: F::one(),
            a02: F::one(),
            a11: -F::two() * zeta1,
            a00: F::one(),
        },
        Biquadratic {
            a22: F::one(),
            a20: F::one(),
            a02: -F::one(),
            a11: -F::two() * zeta2,
            a00: -F::one(),
        },
    )
}

/// Quarter of the reduced resultant, by its closed form:
/// `¼R = 1 + 2(1−2ζ₁²)g₁² + 2(1+2ζ₂²)g₃² + g₁⁴ + 4(1−2ζ₁²+2ζ₂²)g₁²g₃²
///      + g₃⁴ + 2(1+2ζ₂²)g₁⁴g₃² + 2(1−2ζ₁²)g₁²g₃⁴ + g₁⁴g₃⁴`.
pub fn reduced_resultant_closed_form<F: Real>(zeta1: F, zeta2: F) -> PolyGrid<F> {
    let one = F::one();
    let two = F::two();
    let four = F::lit(4.0);
    let z1s = zeta1 * zeta1;
    let z2s = zeta2 * zeta2;
    let mut g = PolyGrid::zero();
    g.c[0][0] = one;
    g.c[2][0] = two * (one - two * z1s);
    g.c[0][2] = two * (one + two * z2s);
    g.c[4][0] = one;
    g.c[2][2] = four * (one - two * z1s + two * z2s);
    g.c[0][4] = one;
    g.c[4][2] = two * (one + two * z2s);
    g.c[2][4] = two * (one - two * z1s);
    g.c[4][4] = one;
    g
}

/// One quadric factor `g₁²g₃² + a·(g₁² − g₃²) − 1` of the reduced resultant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedFactor<F> {
    /// `a = (ζ₁ ± ζ₂)²`.
    pub a: F,
}

impl<F: Real> ReducedFactor<F> {
    pub fn eval(&self, g1: F, g3: F) -> F {
        g1 * g1 * g3 * g3 + self.a * (g1 * g1 - g3 * g3) - F::one()
    }

    pub fn to_grid(&self) -> PolyGrid<F> {
        let mut g = PolyGrid::zero();
        g.c[2][2] = F::one();
        g.c[2][0] = self.a;
        g.c[0][2] = -self.a;
        g.c[0][0] = -F::one();
        g
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Factorization<F> {
    /// The two quadric factors with `a = (ζ₁+ζ₂)²` and `(ζ₁−ζ₂)²`, plus the
    /// max-normalized residual of the product check.
    Factors(ReducedFactor<F>, ReducedFactor<F>, F),
    Irreducible,
}

/// Threshold on the factorization residual beyond which the quartic is
/// declared irreducible.
pub const IRREDUCIBLE_TOL: f64 = 1e-6;

/// Factor the reduced resultant when `ζ₁² − ζ₂² = 1`; otherwise certify
/// irreducibility by the failure of the quadric-splitting consistency
/// conditions and of the candidate product.
pub fn factor_reduced_resultant<F: Real>(zeta1: F, zeta2: F) -> Factorization<F> {
    // a quadric split (P + A·Q − 1)(P + B·Q − 1) forces A+B to match both
    // the g₁² and the g₃² coefficients, which is consistent only when
    // ζ₁² − ζ₂² = 1
    let sum_from_g1 = F::lit(4.0) * zeta1 * zeta1 - F::two();
    let sum_from_g3 = F::two() + F::lit(4.0) * zeta2 * zeta2;
    let split_defect = (sum_from_g1 - sum_from_g3).abs();

    let plus = ReducedFactor { a: (zeta1 + zeta2) * (zeta1 + zeta2) };
    let minus = ReducedFactor { a: (zeta1 - zeta2) * (zeta1 - zeta2) };
    let closed = reduced_resultant_closed_form(zeta1, zeta2);
    let mut product: PolyGrid<F> = PolyGrid::zero();
    let (pg, mg) = (plus.to_grid(), minus.to_grid());
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    product.c[i + k][j + l] =
                        product.c[i + k][j + l] + pg.c[i][j] * mg.c[k][l];
                }
            }
        }
    }
    let scale = closed.max_abs().max(F::one());
    let mut residual = F::zero();
    for i in 0..5 {
        for j in 0..5 {
            residual = residual.max((product.c[i][j] - closed.c[i][j]).abs() / scale);
        }
    }
    if split_defect > F::lit(IRREDUCIBLE_TOL) || residual > F::lit(IRREDUCIBLE_TOL) {
        Factorization::Irreducible
    } else {
        Factorization::Factors(plus, minus, residual)
    }
}

/// The four branch values, closed under `x → 1/x` and `x → −x` for the sets
/// arising here; complex entries occur for non-real branch loci.
#[derive(Clone, Copy, Debug)]
pub struct BranchSet<F> {
    pub points: [Complex<F>; 4],
}

impl<F: Real> BranchSet<F> {
    fn sorted(&self) -> [Complex<F>; 4] {
        let mut pts = self.points;
        pts.sort_by(|a, b| {
            a.re.partial_cmp(&b.re)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
        });
        pts
    }

    /// Max distance between the sorted point lists.
    pub fn distance(&self, other: &Self) -> F {
        let a = self.sorted();
        let b = other.sorted();
        let mut worst = F::zero();
        for i in 0..4 {
            worst = worst.max((a[i] - b[i]).norm());
        }
        worst
    }

    pub fn real_points(&self) -> [F; 4] {
        [self.points[0].re, self.points[1].re, self.points[2].re, self.points[3].re]
    }
}

/// `{±ζ₁ ± √(ζ₁²−1)}` — the branch set of the first reduced equation.
pub fn branch_set_first<F: Real>(zeta1: F) -> BranchSet<F> {
    let root = Complex::new(zeta1 * zeta1 - F::one(), F::zero()).sqrt();
    let z = Complex::new(zeta1, F::zero());
    BranchSet { points: [z + root, z - root, -z + root, -z - root] }
}

/// `{±ζ₂ ± √(ζ₂²+1)}` — the branch set of the second reduced equation.
pub fn branch_set_second<F: Real>(zeta2: F) -> BranchSet<F> {
    let root = Complex::new(zeta2 * zeta2 + F::one(), F::zero()).sqrt();
    let z = Complex::new(zeta2, F::zero());
    BranchSet { points: [z + root, z - root, -z + root, -z - root] }
}

/// `z`-values where the `w`-discriminant of `(z²+λ)(w²+μ) = νzw` vanishes:
/// the two quadratics `z² ∓ (ν/(2√μ))z + λ = 0` (with an imaginary linear
/// coefficient when `μ < 0`).
pub fn branch_points_quad<F: Real>(f: &InvolutionFactors<F>) -> BranchSet<F> {
    let half_nu = Complex::new(f.nu / F::two(), F::zero());
    let sqrt_mu = Complex::new(f.mu, F::zero()).sqrt();
    let b = half_nu / sqrt_mu;
    let lam = Complex::new(f.lambda, F::zero());
    let four = F::lit(4.0);
    let mut pts = [Complex::new(F::zero(), F::zero()); 4];
    for (idx, sign) in [F::one(), -F::one()].iter().enumerate() {
        // z² − (±b) z + λ = 0
        let bb = b * Complex::new(*sign, F::zero());
        let disc = (bb * bb - lam * Complex::new(four, F::zero())).sqrt();
        pts[2 * idx] = (bb + disc) / Complex::new(F::two(), F::zero());
        pts[2 * idx + 1] = (bb - disc) / Complex::new(F::two(), F::zero());
    }
    BranchSet { points: pts }
}

/// Reducibility data for a polyhedron: coincidence of the two branch sets
/// over the shared variable `z`, the resultant factorization, and the
/// proportionality of the two eliminated resultants.
#[derive(Clone, Debug)]
pub struct StachelReport<F> {
    pub branch_set_deviation: F,
    pub factorization: Factorization<F>,
    pub proportionality_deviation: F,
    pub zeta1: F,
    pub zeta2: F,
}

impl<F: Real> StachelReport<F> {
    pub fn pass(&self) -> bool {
        self.branch_set_deviation <= F::lit(1e-9)
            && matches!(self.factorization, Factorization::Factors(..))
            && self.proportionality_deviation <= F::lit(1e-8)
    }
}

pub fn stachel_check<F: Real>(spec: &PolyhedronSpec<F>) -> Result<StachelReport<F>, PlanarError> {
    let spec = normalize_enumeration(spec)?;
    let f = &spec.factors;
    let p1 = Biquadratic::from_factors(f[0].lambda, f[0].mu, f[0].nu);
    let p2 = Biquadratic::from_factors(-f[0].lambda, -f[2].mu, f[1].nu);
    let p3 = Biquadratic::from_factors(f[2].lambda, f[2].mu, f[2].nu);
    let p4 = Biquadratic::from_factors(-f[2].lambda, -f[0].mu, f[3].nu);

    let w1_set = branch_points_quad(&InvolutionFactors {
        lambda: f[0].lambda,
        mu: f[0].mu,
        nu: f[0].nu,
    });
    let w2_set = branch_points_quad(&InvolutionFactors {
        lambda: -f[0].lambda,
        mu: -f[2].mu,
        nu: f[1].nu,
    });
    let branch_set_deviation = w1_set.distance(&w2_set);

    let r12 = resultant_z(&p1, &p2).expect("leading coefficients present");
    // res_u(P₃, P₄) comes out in (w₂, w₁); transpose into (w₁, w₂)
    let r34 = resultant_z(&p3, &p4).expect("leading coefficients present").transpose();
    let proportionality_deviation = r12.proportionality_deviation(&r34);

    // the stored ζ's are the rational-route values; fall back to the
    // factor route for hand-assembled specs
    let zetas = if spec.zetas[0] > F::one() {
        spec.zetas
    } else {
        crate::planar::zetas_from_factors(f)
    };
    Ok(StachelReport {
        branch_set_deviation,
        factorization: factor_reduced_resultant(zetas[0], zetas[1]),
        proportionality_deviation,
        zeta1: zetas[0],
        zeta2: zetas[1],
    })
}
