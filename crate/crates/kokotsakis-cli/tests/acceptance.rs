//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Criteria 1 and 3 contain clauses that are not attainable as literally
//! stated (see the assertion messages); they are asserted at their stated
//! tolerances regardless, with the measured values reported.

use kokotsakis::elliptic::{fit_alignment, flexion_elliptic, modulus_from_zeta};
use kokotsakis::flexion::{flexion_elementary, reduce, Branch, SystemCoeffs};
use kokotsakis::planar::{
    construct_spec, normalize_enumeration,
    spec_from_json, z_values, BaseAngles, PolyhedronSpec, RCQuadruple, XYSParams,
};
use kokotsakis::resultant::{factor_reduced_resultant, stachel_check, Factorization};
use kokotsakis::screening;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

const SEC7_DELTAS: [f64; 4] = [1.36292, 1.41009, 1.80327, 1.70691];
const SEC7_ALPHA: [f64; 4] = [1.34086, 1.42575, 1.69859, 1.81798];
const SEC7_GAMMA: [f64; 4] = [1.15746, 2.00166, 1.4875, 1.63656];
const SEC7_BETA: [f64; 4] = [1.11122, 1.18397, 1.61684, 1.68958];

fn sec7_spec() -> PolyhedronSpec<f64> {
    let base = BaseAngles::new(SEC7_DELTAS).unwrap();
    construct_spec(&base, -(60.0f64).atan(), None).unwrap()
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!("criterion {criterion}: {}  — {detail}", if pass { "PASS" } else { "FAIL" });
}

fn fold(v: f64) -> f64 {
    if v > std::f64::consts::PI {
        v - std::f64::consts::PI
    } else {
        v
    }
}

/// Criterion 1: the published construction command reproduces the worked
/// angle table within 1e-4 and the elliptic modulus within 2e-4, in under
/// one second.
#[test]
fn acceptance_1_worked_example_reproduction() {
    let start = Instant::now();
    let out = tempdir_file("sec7.json");
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_kokotsakis"))
        .args([
            "construct",
            "--deltas",
            "1.36292,1.41009,1.80327,1.70691",
            "--tau",
            "-1.55413",
            "--out",
        ])
        .arg(&out)
        .status()
        .expect("spawn construct");
    assert!(status.success(), "construct exited with {status}");
    let spec: PolyhedronSpec<f64> =
        spec_from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let elapsed = start.elapsed();

    let mut worst: (f64, String) = (0.0, String::new());
    for i in 0..4 {
        for (name, got, want) in [
            ("alpha", fold(spec.quads[i].alpha), SEC7_ALPHA[i]),
            ("gamma", fold(spec.quads[i].gamma), SEC7_GAMMA[i]),
            ("beta", spec.quads[i].beta, SEC7_BETA[i]),
        ] {
            let d = (got - want).abs();
            if d > worst.0 {
                worst = (d, format!("{name}[{}] = {got:.6} vs {want}", i + 1));
            }
        }
    }
    let zeta1 = spec.zetas[0];
    let k = {
        let r = zeta1 + (zeta1 * zeta1 - 1.0).sqrt();
        1.0 / (r * r)
    };
    let k_dev = (k - 0.0083).abs();

    // reference: the same pipeline at τ = −arctan 60 to machine precision
    let exact = sec7_spec();
    let mut exact_worst = 0.0f64;
    for i in 0..4 {
        exact_worst = exact_worst
            .max((fold(exact.quads[i].alpha) - SEC7_ALPHA[i]).abs())
            .max((fold(exact.quads[i].gamma) - SEC7_GAMMA[i]).abs())
            .max((exact.quads[i].beta - SEC7_BETA[i]).abs());
    }

    let pass = worst.0 <= 1e-4 && k_dev <= 2e-4 && elapsed.as_secs_f64() < 1.0;
    report(
        "1 (worked-example reproduction)",
        pass,
        &format!(
            "max angle deviation {:.3e} ({}), |k − 0.0083| = {:.2e}, {:.0} ms; \
             at machine-precision τ the max deviation is {:.3e}",
            worst.0,
            worst.1,
            k_dev,
            elapsed.as_secs_f64() * 1e3,
            exact_worst
        ),
    );
    assert!(elapsed.as_secs_f64() < 1.0, "construct took {elapsed:?}");
    assert!(k_dev <= 2e-4, "k deviation {k_dev:e}");
    assert!(
        worst.0 <= 1e-4,
        "angle table deviates by {:.3e} at {}: the criterion's flag value -1.55413 is the \
         published five-decimal rounding of −arctan 60; that print precision carries \
         ±2e-4 of angle uncertainty near the tangent pole (dangle/dτ ≈ 70 here), so the \
         stated tolerance cannot be met from the stated flag. The same pipeline at \
         machine-precision τ matches the table to {:.3e}. See the decisions ledger.",
        worst.0,
        worst.1,
        exact_worst
    );
}

/// Criterion 2: 720 samples × 4 branches satisfy all four coupling
/// residuals to 1e-9, in under one second.
#[test]
fn acceptance_2_flexion_residuals() {
    let spec = sec7_spec();
    let start = Instant::now();
    let rc = reduce(&spec).unwrap();
    let sys = SystemCoeffs::from_spec(&spec).unwrap();
    let mut worst = 0.0f64;
    for branch in Branch::ALL {
        for i in 0..720 {
            let t = 2.0 * std::f64::consts::PI * i as f64 / 720.0;
            for r in sys.residuals(&flexion_elementary(&rc, branch, t)) {
                worst = worst.max(r.abs());
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-9 && elapsed.as_secs_f64() < 1.0;
    report(
        "2 (flexion residuals)",
        pass,
        &format!("max residual {worst:.3e} over 2880 samples, {:.0} ms", elapsed.as_secs_f64() * 1e3),
    );
    assert!(worst <= 1e-9, "max residual {worst:e}");
    assert!(elapsed.as_secs_f64() < 1.0);
}

/// Criterion 3: elliptic samples satisfy the system to 1e-8, and after the
/// fitted linear reparameterization the two dihedral-angle curve families
/// agree within 2e-2 radians, in under five seconds.
#[test]
fn acceptance_3_elliptic_equivalence() {
    let spec = sec7_spec();
    let start = Instant::now();
    let rc = reduce(&spec).unwrap();
    let md = modulus_from_zeta(rc.zeta1());
    let sys = SystemCoeffs::from_spec(&spec).unwrap();
    let mut worst_res = 0.0f64;
    for branch in Branch::ALL {
        for i in 0..720 {
            let t = 2.0 * md.big_k_prime * i as f64 / 720.0;
            for r in sys.residuals(&flexion_elliptic(&rc, &md, branch, t)) {
                worst_res = worst_res.max(r.abs());
            }
        }
    }
    let fit = fit_alignment(&spec, 240).unwrap();
    let elapsed = start.elapsed();
    let pass = worst_res <= 1e-8 && fit.max_diff <= 2e-2 && elapsed.as_secs_f64() < 5.0;
    report(
        "3 (elliptic equivalence)",
        pass,
        &format!(
            "max residual {worst_res:.3e}, max curve difference {:.4} rad after fitting \
             shift {:.4}, {:.0} ms",
            fit.max_diff,
            fit.shift,
            elapsed.as_secs_f64() * 1e3
        ),
    );
    assert!(worst_res <= 1e-8, "elliptic residual {worst_res:e}");
    assert!(elapsed.as_secs_f64() < 5.0);
    assert!(
        fit.max_diff <= 2e-2,
        "the two parameterizations differ by {:.4} rad max after the fitted linear \
         reparameterization (the fitted shift {:.4} reproduces the published 7.717). \
         The minimax difference for this modulus (k ≈ 0.0083) is ≈ 8e-2: the curves \
         coincide as sets (their nearest-point distance is < 1e-6) but no linear \
         parameter map brings the pointwise difference under 2e-2 — agreement improves \
         only as ζ₁ → 1. See the decisions ledger.",
        fit.max_diff,
        fit.shift
    );
}

fn random_admissible_specs(count: usize, seed: u64) -> Vec<PolyhedronSpec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut specs = Vec::new();
    let half = std::f64::consts::FRAC_PI_2;
    let mut attempts = 0;
    while specs.len() < count && attempts < 20_000 {
        attempts += 1;
        let p = XYSParams {
            x: rng.gen_range(-half..half),
            y: rng.gen_range(-half..half),
            s: rng.gen_range(-half..half),
        };
        if let Some(tau) = screening::admissible_tau(&p, 96) {
            if let Ok(spec) = screening::construct_at_point(&p, tau) {
                specs.push(spec);
            }
        }
    }
    assert_eq!(specs.len(), count, "sampler exhausted after {attempts} attempts");
    specs
}

/// Criterion 4: branch sets coincide and the reduced resultant factors for
/// the worked spec and 50 random admissible specs; 50 perturbed ζ pairs are
/// declared irreducible. Under ten seconds.
#[test]
fn acceptance_4_reducibility() {
    let start = Instant::now();
    let mut specs = vec![sec7_spec()];
    specs.extend(random_admissible_specs(50, 42));
    let mut worst_branch = 0.0f64;
    let mut worst_product = 0.0f64;
    for spec in &specs {
        let r = stachel_check(spec).unwrap();
        worst_branch = worst_branch.max(r.branch_set_deviation);
        match r.factorization {
            Factorization::Factors(_, _, residual) => worst_product = worst_product.max(residual),
            Factorization::Irreducible => panic!("admissible spec declared irreducible"),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut irreducible = 0;
    for _ in 0..50 {
        let zeta1 = rng.gen_range(1.05f64..6.0);
        let mut zeta2 = (zeta1 * zeta1 - 1.0).sqrt();
        let bump = rng.gen_range(1e-3f64..0.3);
        zeta2 += if rng.gen_bool(0.5) { bump } else { -bump };
        if factor_reduced_resultant(zeta1, zeta2) == Factorization::Irreducible {
            irreducible += 1;
        }
    }
    let elapsed = start.elapsed();
    let pass = worst_branch <= 1e-9
        && worst_product <= 1e-12
        && irreducible == 50
        && elapsed.as_secs_f64() < 10.0;
    report(
        "4 (reducibility verification)",
        pass,
        &format!(
            "51 specs: max branch-set deviation {worst_branch:.3e}, max product residual \
             {worst_product:.3e}; {irreducible}/50 perturbed pairs irreducible; {:.1} s",
            elapsed.as_secs_f64()
        ),
    );
    assert!(worst_branch <= 1e-9, "branch sets deviate by {worst_branch:e}");
    assert!(worst_product <= 1e-12, "product residual {worst_product:e}");
    assert_eq!(irreducible, 50);
    assert!(elapsed.as_secs_f64() < 10.0);
}

/// Criterion 5: flattening events at t ∈ {π/4, 3π/4, 5π/4, 7π/4} ± 1e-9;
/// φ and ψ₁ stay within the arccosh(2ζ₁−1) log bound; the mesh bold-edge
/// dihedrals hit 0/π simultaneously within 1e-7.
#[test]
fn acceptance_5_flattening() {
    let spec = sec7_spec();
    let rc = reduce(&spec).unwrap();
    let z1 = rc.zeta1();
    let q = std::f64::consts::FRAC_PI_4;

    // locate the flattening parameters by bisection on f₁ − 1 and g₁ − 1
    let f1 = |t: f64| {
        kokotsakis::flexion::f_of(t, z1) * kokotsakis::flexion::f_of(t + 2.0 * q, z1)
    };
    let g1 = |t: f64| {
        kokotsakis::flexion::f_of(t, z1) * kokotsakis::flexion::f_of(t - 2.0 * q, z1)
    };
    let locate = |h: &dyn Fn(f64) -> f64, lo: f64, hi: f64| -> f64 {
        let (mut lo, mut hi) = (lo, hi);
        assert!((h(lo) - 1.0).signum() != (h(hi) - 1.0).signum());
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if (h(mid) - 1.0).signum() == (h(lo) - 1.0).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let mut worst_t = 0.0f64;
    for (h, expect) in [
        (&g1 as &dyn Fn(f64) -> f64, q),
        (&f1, 3.0 * q),
        (&g1, 5.0 * q),
        (&f1, 7.0 * q),
    ] {
        let found = locate(h, expect - 0.3, expect + 0.3);
        worst_t = worst_t.max((found - expect).abs());
    }

    // φ and ψ₁ never flatten: log bound on the tangent-half variables
    let bound = (2.0 * z1 - 1.0).acosh() + 1e-10;
    let mut worst_log = 0.0f64;
    for i in 0..4096 {
        let t = 2.0 * std::f64::consts::PI * i as f64 / 4096.0;
        worst_log = worst_log.max(f1(t).ln().abs()).max(g1(t).ln().abs());
    }

    // mesh: the bold-edge dihedrals and the flattening base edge hit 0/π
    // together
    let spec_n = normalize_enumeration(&spec).unwrap();
    let base = kokotsakis::embed::realize_base(&spec_n.base).unwrap();
    let flat_dist = |a: f64| {
        let m = a.rem_euclid(std::f64::consts::PI);
        m.min(std::f64::consts::PI - m)
    };
    let mut worst_mesh = 0.0f64;
    for (t, wing_idx, base_dihedral) in
        [(3.0 * q, [1usize, 6], 3usize), (q, [0, 3], 2), (5.0 * q, [0, 3], 2), (7.0 * q, [1, 6], 3)]
    {
        let sample = flexion_elementary(&rc, Branch::ALL[0], t);
        let frame = kokotsakis::embed::build_frame(&spec_n, &base, &sample).unwrap();
        let w = frame.wing_edge_angles();
        for idx in wing_idx {
            worst_mesh = worst_mesh.max(flat_dist(w[idx]));
        }
        // the flattening base edge carries ψ₂ (index 3) or θ (index 2)
        worst_mesh = worst_mesh.max(flat_dist(sample.dihedrals()[base_dihedral]));
    }

    let pass = worst_t <= 1e-9 && worst_log <= bound && worst_mesh <= 1e-7;
    report(
        "5 (flattening)",
        pass,
        &format!(
            "event location error {worst_t:.3e}, max |log f₁|, |log g₁| = {worst_log:.4} \
             (bound {bound:.4}), mesh bold-edge deviation {worst_mesh:.3e}"
        ),
    );
    assert!(worst_t <= 1e-9);
    assert!(worst_log <= bound);
    assert!(worst_mesh <= 1e-7);
}

/// Criterion 6: 120 frames per branch keep every edge length and face angle
/// constant within 1e-8 and reproduce each βᵢ within 1e-8, in under ten
/// seconds.
#[test]
fn acceptance_6_isometry() {
    let start = Instant::now();
    let spec = normalize_enumeration(&sec7_spec()).unwrap();
    let rc = reduce(&spec).unwrap();
    let base = kokotsakis::embed::realize_base(&spec.base).unwrap();
    let mut worst_edge = 0.0f64;
    let mut worst_angle = 0.0f64;
    let mut worst_cone = 0.0f64;
    for branch in Branch::ALL {
        let frames: Vec<_> = (0..120)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / 120.0;
                // build_frame enforces cone closure at 1e-8; re-measure here
                let frame = kokotsakis::embed::build_frame(
                    &spec,
                    &base,
                    &flexion_elementary(&rc, branch, t),
                )
                .unwrap();
                for v in 0..4 {
                    let a = frame.vertices[v];
                    let prev = frame.vertices[4 + 2 * ((v + 3) % 4) + 1].sub(a).normalized();
                    let next = frame.vertices[4 + 2 * v].sub(a).normalized();
                    let measured = prev.dot(next).clamp(-1.0, 1.0).acos();
                    worst_cone = worst_cone.max((measured - spec.quads[v].beta).abs());
                }
                frame
            })
            .collect();
        let rep = kokotsakis::embed::verify_isometry(&frames);
        worst_edge = worst_edge.max(rep.max_edge_deviation);
        worst_angle = worst_angle.max(rep.max_angle_deviation);
    }
    let elapsed = start.elapsed();
    let pass = worst_edge <= 1e-8
        && worst_angle <= 1e-8
        && worst_cone <= 1e-8
        && elapsed.as_secs_f64() < 10.0;
    report(
        "6 (isometric flexion witness)",
        pass,
        &format!(
            "480 frames: edge deviation {worst_edge:.3e}, face-angle deviation \
             {worst_angle:.3e}, cone-closure deviation {worst_cone:.3e}, {:.1} s",
            elapsed.as_secs_f64()
        ),
    );
    assert!(pass);
}

/// Criterion 7: 10⁴ random (τ, x, y, s) draws where the closed form
/// evaluates satisfy Z₁ = Z₃, Z₂ = Z₄, Z₁ + Z₂ = 4 within 1e-9, in under
/// five seconds.
#[test]
fn acceptance_7_z_system_property() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut accepted = 0usize;
    let mut worst = 0.0f64;
    // "evaluation succeeds" = the closed form is numerically meaningful:
    // no catastrophic cancellation in N + S√L or D, values away from the
    // poles of 1/(r(1−r)), and a bounded Z split
    let well_conditioned = |tau: f64, pp: &XYSParams<f64>| -> bool {
        let t = kokotsakis::planar::coefficient_table(pp);
        let (st, ct) = tau.sin_cos();
        let s = t.s10 * ct + t.s01 * st;
        let l = (t.l20 * ct * ct + t.l11 * st * ct + t.l02 * st * st).max(0.0);
        let n = t.n20 * ct * ct + t.n11 * st * ct + t.n02 * st * st;
        let d = t.d20 * ct * ct + t.d11 * st * ct + t.d02 * st * st;
        let root = s * l.sqrt();
        (n + root).abs() > 1e-2 * (n.abs() + root.abs())
            && d.abs() > 1e-2 * (t.d20.abs() + t.d11.abs() + t.d02.abs()).max(1e-6)
    };
    while accepted < 10_000 {
        let p = XYSParams {
            x: rng.gen_range(-0.7f64..0.7),
            y: rng.gen_range(-0.7f64..0.7),
            s: rng.gen_range(-0.7f64..0.7),
        };
        let base = match BaseAngles::from_xys(&p) {
            Ok(b) => b,
            Err(_) => continue,
        };
        if base.deltas.iter().any(|d| d.cos().abs() < 0.05) {
            continue;
        }
        let tau = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
        if tau.tan().abs() > 10.0 {
            continue;
        }
        let flips = [
            (p, tau),
            (XYSParams { x: p.x, y: -p.y, s: p.s }, tau + std::f64::consts::PI),
            (XYSParams { x: -p.x, y: -p.y, s: p.s }, tau),
            (XYSParams { x: -p.x, y: p.y, s: p.s }, tau + std::f64::consts::PI),
        ];
        if flips.iter().any(|(pp, tt)| !well_conditioned(*tt, pp)) {
            continue;
        }
        let vals: Vec<f64> = match flips
            .iter()
            .map(|(pp, tt)| kokotsakis::planar::r1_of(*tt, pp))
            .collect::<Result<_, _>>()
        {
            Ok(v) => v,
            Err(_) => continue,
        };
        // the Z identities hold for the raw quadruple whether or not it is
        // in the admissible range, as long as the values are usable
        if vals.iter().any(|v| !v.is_finite() || v.abs() < 0.05 || (1.0 - v).abs() < 0.05) {
            continue;
        }
        let rc = RCQuadruple { r1: vals[0], c1: vals[1], r3: vals[2], c3: vals[3] };
        let z = z_values(&rc, &base.deltas);
        worst = worst
            .max((z[0] - z[2]).abs())
            .max((z[1] - z[3]).abs())
            .max((z[0] + z[1] - 4.0).abs());
        accepted += 1;
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-9 && elapsed.as_secs_f64() < 5.0;
    report(
        "7 (Z-system property)",
        pass,
        &format!("10⁴ draws, max residual {worst:.3e}, {:.1} s", elapsed.as_secs_f64()),
    );
    assert!(worst <= 1e-9, "Z residual {worst:e}");
    assert!(elapsed.as_secs_f64() < 5.0);
}

/// Criterion 8: a 24³ screening grid finishes in under five minutes on
/// eight workers, the worked point is admissible, and both region
/// symmetries hold for every admissible grid point.
#[test]
fn acceptance_8_screening() {
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(8).build().unwrap();
    let bounds = screening::Bounds3::half_pi_cube();
    let tau_grid = 256;
    let points = pool.install(|| screening::screen_grid::<f64>(24, &bounds, tau_grid));
    let elapsed_grid = start.elapsed();
    assert_eq!(points.len(), 24 * 24 * 24);

    let sec7 = XYSParams { x: -0.220175, y: -0.14840765358979302, s: 0.012298673205103416 };
    let sec7_admissible = screening::admissible_tau(&sec7, tau_grid).is_some();

    let admissible: Vec<_> = points.iter().filter(|p| p.admissible).collect();
    let mut central_ok = 0usize;
    let mut mirror_ok = 0usize;
    // re-search τ for each image point: the original witness (and its
    // reflections) first, then the grid scan at increasing resolution
    let image_admissible = |img: &XYSParams<f64>, witness: f64| -> bool {
        let pi = std::f64::consts::PI;
        for cand in [witness, witness + pi, pi - witness, -witness] {
            if screening::construct_at_point(img, cand.rem_euclid(2.0 * pi)).is_ok() {
                return true;
            }
        }
        screening::admissible_tau(img, tau_grid).is_some()
            || screening::admissible_tau(img, 4 * tau_grid).is_some()
    };
    pool.install(|| {
        use rayon::prelude::*;
        let results: Vec<(bool, bool)> = admissible
            .par_iter()
            .map(|pt| {
                let p = XYSParams { x: pt.x, y: pt.y, s: pt.s };
                let w = pt.tau_witness.unwrap();
                let c = image_admissible(&screening::central_image(&p), w);
                let m = image_admissible(&screening::mirror_image(&p), w);
                (c, m)
            })
            .collect();
        central_ok = results.iter().filter(|r| r.0).count();
        mirror_ok = results.iter().filter(|r| r.1).count();
    });
    let elapsed = start.elapsed();
    let pass = elapsed.as_secs_f64() < 300.0
        && sec7_admissible
        && central_ok == admissible.len()
        && mirror_ok == admissible.len();
    report(
        "8 (parameter-space screening)",
        pass,
        &format!(
            "24³ grid in {:.1} s ({} admissible), worked point admissible: {}, central \
             symmetry {central_ok}/{}, mirror symmetry {mirror_ok}/{}, total {:.1} s",
            elapsed_grid.as_secs_f64(),
            admissible.len(),
            sec7_admissible,
            admissible.len(),
            admissible.len(),
            elapsed.as_secs_f64()
        ),
    );
    assert!(sec7_admissible, "worked point not admissible");
    assert!(!admissible.is_empty(), "region came out empty");
    assert_eq!(central_ok, admissible.len(), "central symmetry violated");
    assert_eq!(mirror_ok, admissible.len(), "mirror symmetry violated");
    assert!(elapsed.as_secs_f64() < 300.0, "screening took {elapsed:?}");
}

/// Criterion 9: 10³ valid specs under randomized cyclic enumeration all
/// normalize to the canonical sign pattern, which no second shift attains.
#[test]
fn acceptance_9_sign_pattern() {
    let specs = random_admissible_specs(100, 99);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0usize;
    // 100 base specs × 10 random rotations = 10³ normalization runs
    for spec in &specs {
        for _ in 0..10 {
            let shift = rng.gen_range(0u8..4);
            let rotated = rotate_spec(spec, shift);
            let normalized = normalize_enumeration(&rotated).expect("pattern found");
            assert!(normalized.is_normalized());
            assert!(normalized.zetas[0] > 1.0);
            // uniqueness: exactly one cyclic shift matches the pattern
            let matches = (0..4u8)
                .filter(|&s| {
                    let again = rotate_spec(&rotated, s);
                    again.needed_shift() == Ok(0)
                })
                .count();
            assert_eq!(matches, 1, "sign pattern matched by {matches} shifts");
            checked += 1;
        }
    }
    report(
        "9 (sign-pattern uniqueness)",
        checked == 1000,
        &format!("{checked} randomized enumerations normalized, single-pattern each"),
    );
    assert_eq!(checked, 1000);
}

/// Rotate the stored vertex order by `shift`, exchanging the two coupling
/// roles on odd shifts (the same bookkeeping normalization applies).
fn rotate_spec(spec: &PolyhedronSpec<f64>, shift: u8) -> PolyhedronSpec<f64> {
    use kokotsakis::sphquad::{InvolutionFactors, SphericalQuad};
    let odd = shift % 2 == 1;
    let mut out = spec.clone();
    for i in 0..4 {
        let src = (i + shift as usize) % 4;
        let q = spec.quads[src];
        out.quads[i] = if odd {
            SphericalQuad { alpha: q.gamma, beta: q.beta, gamma: q.alpha, delta: q.delta }
        } else {
            q
        };
        let f = spec.factors[src];
        out.factors[i] = if odd {
            InvolutionFactors { lambda: f.mu, mu: f.lambda, nu: f.nu }
        } else {
            f
        };
        out.base.deltas[i] = spec.base.deltas[src];
        out.sigma.alpha[i] =
            if odd { spec.sigma.gamma[src] } else { spec.sigma.alpha[src] };
        out.sigma.gamma[i] =
            if odd { spec.sigma.alpha[src] } else { spec.sigma.gamma[src] };
    }
    if odd {
        out.tau = -spec.tau;
    }
    out
}

fn tempdir_file(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join("kokotsakis-acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}
