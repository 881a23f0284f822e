//! Screening of the `(x, y, s)` parameter space.
//!
//! For each point the pipeline searches for a parameter `τ` at which the
//! full construction goes through: the closed-form quadruple exists and
//! lies in range, every `βᵢ` is defined, and all four vertex quadrilaterals
//! are elliptic with a flexible normalized arrangement. Grid cells are
//! independent work items; results are collected in row-major order so two
//! runs produce identical bytes.

use crate::planar::{
    construct_at_xys, BaseAngles, FailureStage, PlanarError, PolyhedronSpec, XYSParams,
};
use crate::Real;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Default τ-scan resolution.
pub const DEFAULT_TAU_GRID: usize = 1024;
/// Bisection steps used when refining a stage boundary in τ.
pub const BOUNDARY_BISECTIONS: usize = 40;

/// One screened parameter point.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ScreenPoint<F> {
    pub x: F,
    pub y: F,
    pub s: F,
    pub admissible: bool,
    pub tau_witness: Option<F>,
    pub failure_stage: FailureStage,
    /// Whether the reconstructed base quadrilateral is convex (every angle
    /// below π).
    pub convex: bool,
}

/// Construct a spec at a screening point, reducing the reconstructed base
/// angles mod 2π. Returns the stage reached on failure.
pub fn construct_at_point<F: Real>(
    p: &XYSParams<F>,
    tau: F,
) -> Result<PolyhedronSpec<F>, (FailureStage, PlanarError)> {
    let base = BaseAngles::from_xys(p).map_err(|e| (FailureStage::RcRange, e))?;
    construct_at_xys(&base, p, tau, None)
}

/// Scan for a validated τ and return the first witness, together with the
/// deepest stage any candidate reached.
///
/// Two passes of `grid` samples each: first uniform in τ over `[0, 2π)`,
/// then uniform in `1/Z` where `Z = 2 + 2|tan τ|` is the split of the
/// vertex system. Admissible windows are frequently narrow in τ but wide in
/// `Z` (they sit close to the tangent poles), so the second pass resolves
/// what the first undersamples.
pub fn scan_tau<F: Real>(p: &XYSParams<F>, grid: usize) -> (Option<F>, FailureStage) {
    let grid = grid.max(1);
    let mut deepest = FailureStage::RcRange;
    let mut try_tau = |tau: F| -> Option<F> {
        match construct_at_point(p, tau) {
            Ok(_) => Some(tau),
            Err((stage, _)) => {
                if stage > deepest && stage != FailureStage::None {
                    deepest = stage;
                }
                None
            }
        }
    };
    for i in 0..grid {
        let tau = F::tau_full() * F::from_usize(i).unwrap() / F::from_usize(grid).unwrap();
        if let Some(t) = try_tau(tau) {
            return (Some(t), FailureStage::None);
        }
    }
    for i in 0..grid {
        // w ∈ (0, 1/4), Z = 1/w > 4, tan τ = ±(Z − 2)/2
        let w = (F::from_usize(i).unwrap() + F::lit(0.5)) / F::from_usize(grid).unwrap()
            / F::lit(4.0);
        let slope = (F::one() / w - F::two()) / F::two();
        let t = slope.atan();
        for cand in [t, t + F::PI(), F::PI() - t, -t] {
            if let Some(tau) = try_tau(cand.rem_two_pi()) {
                return (Some(tau), FailureStage::None);
            }
        }
    }
    (None, deepest)
}

/// First validated τ on the scan grid, or `None`.
pub fn admissible_tau<F: Real>(p: &XYSParams<F>, grid: usize) -> Option<F> {
    scan_tau(p, grid).0
}

/// Refine the admissibility boundary between a failing and a passing τ by
/// bisection; returns the passing-side endpoint after
/// [`BOUNDARY_BISECTIONS`] steps.
pub fn refine_boundary<F: Real>(p: &XYSParams<F>, tau_fail: F, tau_pass: F) -> F {
    let mut bad = tau_fail;
    let mut good = tau_pass;
    for _ in 0..BOUNDARY_BISECTIONS {
        let mid = (bad + good) / F::two();
        if construct_at_point(p, mid).is_ok() {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}

fn convexity<F: Real>(p: &XYSParams<F>) -> bool {
    match BaseAngles::from_xys(p) {
        Ok(b) => b.deltas.iter().all(|&d| d < F::PI()),
        Err(_) => false,
    }
}

/// Screen one point.
pub fn screen_point<F: Real>(x: F, y: F, s: F, tau_grid: usize) -> ScreenPoint<F> {
    let p = XYSParams { x, y, s };
    let (witness, stage) = scan_tau(&p, tau_grid);
    ScreenPoint {
        x,
        y,
        s,
        admissible: witness.is_some(),
        tau_witness: witness,
        failure_stage: if witness.is_some() { FailureStage::None } else { stage },
        convex: convexity(&p),
    }
}

/// Axis-aligned box in `(x, y, s)`.
#[derive(Clone, Copy, Debug)]
pub struct Bounds3<F> {
    pub min: [F; 3],
    pub max: [F; 3],
}

impl<F: Real> Bounds3<F> {
    /// `(−π/2, π/2)³`.
    pub fn half_pi_cube() -> Self {
        let h = F::FRAC_PI_2();
        Bounds3 { min: [-h, -h, -h], max: [h, h, h] }
    }
}

/// Uniform cell-center scan of `resolution³` points in row-major
/// `(x, y, s)` order; cells are screened in parallel and collected
/// deterministically.
pub fn screen_grid<F: Real>(
    resolution: usize,
    bounds: &Bounds3<F>,
    tau_grid: usize,
) -> Vec<ScreenPoint<F>> {
    assert!(resolution >= 2, "resolution must be at least 2");
    let n = resolution;
    let coord = |axis: usize, i: usize| {
        bounds.min[axis]
            + (bounds.max[axis] - bounds.min[axis])
                * (F::from_usize(i).unwrap() + F::lit(0.5))
                / F::from_usize(n).unwrap()
    };
    (0..n * n * n)
        .into_par_iter()
        .map(|idx| {
            let i = idx / (n * n);
            let j = (idx / n) % n;
            let k = idx % n;
            screen_point(coord(0, i), coord(1, j), coord(2, k), tau_grid)
        })
        .collect()
}

/// The central reflection through `(π/4, π/4, π/4)`.
pub fn central_image<F: Real>(p: &XYSParams<F>) -> XYSParams<F> {
    let h = F::FRAC_PI_2();
    XYSParams { x: h - p.x, y: h - p.y, s: h - p.s }
}

/// The mirror across the plane `x = y`.
pub fn mirror_image<F: Real>(p: &XYSParams<F>) -> XYSParams<F> {
    XYSParams { x: p.y, y: p.x, s: p.s }
}

pub const CSV_HEADER: &str = "x,y,s,admissible,tau,failure_stage,convex";

/// 10 significant digits.
fn fmt10<F: Real>(v: F) -> String {
    format!("{:.9e}", v.to_f64().unwrap_or(f64::NAN))
}

pub fn csv_row<F: Real>(pt: &ScreenPoint<F>) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        fmt10(pt.x),
        fmt10(pt.y),
        fmt10(pt.s),
        pt.admissible,
        pt.tau_witness.map(fmt10).unwrap_or_default(),
        pt.failure_stage.as_str(),
        pt.convex
    )
}

/// Row of the base-angle dump for admissible points:
/// `delta1,delta2,delta3,convex`.
pub fn deltas_row<F: Real>(pt: &ScreenPoint<F>) -> Option<String> {
    if !pt.admissible {
        return None;
    }
    let b = BaseAngles::from_xys(&XYSParams { x: pt.x, y: pt.y, s: pt.s }).ok()?;
    Some(format!(
        "{},{},{},{}",
        fmt10(b.deltas[0]),
        fmt10(b.deltas[1]),
        fmt10(b.deltas[2]),
        pt.convex
    ))
}
