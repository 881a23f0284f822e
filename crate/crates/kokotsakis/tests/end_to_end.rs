//! Cross-module integration: base angles through flexion to the mesh, and a
//! check that the numeric core instantiates at a second scalar type.

use kokotsakis::elliptic::{flexion_elliptic, modulus_from_zeta, sn_cn_dn};
use kokotsakis::flexion::{f_of, flexion_elementary, reduce, Branch, SystemCoeffs};
use kokotsakis::planar::{construct_spec, normalize_enumeration, BaseAngles, XYSParams};
use kokotsakis::screening::{admissible_tau, construct_at_point};

#[test]
fn pipeline_from_deltas_to_mesh() {
    let base = BaseAngles::new([1.36292f64, 1.41009, 1.80327, 1.70691]).unwrap();
    let spec = construct_spec(&base, -(60.0f64).atan(), None).unwrap();
    let spec = normalize_enumeration(&spec).unwrap();
    let rc = reduce(&spec).unwrap();
    let sys = SystemCoeffs::from_spec(&spec).unwrap();
    let md = modulus_from_zeta(rc.zeta1());
    let realization = kokotsakis::embed::realize_base(&spec.base).unwrap();

    let mut frames = Vec::new();
    for i in 0..40 {
        let t = 2.0 * std::f64::consts::PI * i as f64 / 40.0;
        let sample = flexion_elementary(&rc, Branch::ALL[1], t);
        let worst =
            sys.residuals(&sample).iter().fold(0.0f64, |m, r| m.max(r.abs()));
        assert!(worst < 1e-9);
        frames.push(kokotsakis::embed::build_frame(&spec, &realization, &sample).unwrap());

        let u = 2.0 * md.big_k_prime * i as f64 / 40.0;
        let ell = flexion_elliptic(&rc, &md, Branch::ALL[1], u);
        let worst_ell =
            sys.residuals(&ell).iter().fold(0.0f64, |m, r| m.max(r.abs()));
        assert!(worst_ell < 1e-8);
    }
    assert!(kokotsakis::embed::verify_isometry(&frames).pass());
}

#[test]
fn screening_points_round_trip_the_pipeline() {
    // every admissible point feeds back through the construction and passes
    // the planar and flexion invariants at its witness
    let candidates = [
        XYSParams { x: -0.220175f64, y: -0.14840765358979302, s: 0.012298673205103416 },
        XYSParams { x: 0.31, y: 0.22, s: -0.05 },
        XYSParams { x: -0.4, y: 0.1, s: 0.3 },
    ];
    let mut seen = 0;
    for p in candidates {
        let Some(tau) = admissible_tau(&p, 256) else { continue };
        seen += 1;
        let spec = construct_at_point(&p, tau).unwrap();
        assert!(spec.pairing_residuals().iter().all(|r| r.abs() < 1e-9));
        assert!(spec.proportionality_residuals().iter().all(|r| r.abs() < 1e-9));
        let rc = reduce(&spec).unwrap();
        assert!(rc.zeta1() > 1.0);
        let sys = SystemCoeffs::from_spec(&spec).unwrap();
        for i in 0..64 {
            let t = 2.0 * std::f64::consts::PI * i as f64 / 64.0;
            let s = flexion_elementary(&rc, Branch::ALL[0], t);
            assert!(sys.residuals(&s).iter().all(|r| r.abs() < 1e-9));
        }
    }
    assert!(seen >= 1, "no candidate point was admissible");
}

#[test]
fn core_math_instantiates_at_f32() {
    // the generic surface works at reduced precision
    let z1 = 5.5227f32;
    assert!((f_of(0.0f32, z1) - 1.0).abs() < 1e-6);
    let (sn, cn, dn) = sn_cn_dn(0.8f32, 0.25f32);
    assert!((sn * sn + cn * cn - 1.0).abs() < 1e-6);
    assert!((dn * dn + 0.25f32 * 0.25 * sn * sn - 1.0).abs() < 1e-6);
    let q = kokotsakis::sphquad::SphericalQuad::new(
        std::f32::consts::FRAC_PI_3,
        (1.0f32 / (2.0 * 3.0f32.sqrt())).acos(),
        std::f32::consts::FRAC_PI_3,
        std::f32::consts::FRAC_PI_6,
    )
    .unwrap();
    assert!(q.is_orthodiagonal(1e-6));
    let f = q.involution_factors().unwrap();
    assert!((f.lambda + 2.0).abs() < 1e-5);
}
