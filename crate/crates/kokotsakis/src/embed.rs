//! Realization of the flexing polyhedron in 3-space.
//!
//! The base quadrilateral lies in the `z = 0` plane; each wing plane is the
//! base plane rotated about its edge by the exterior dihedral angle of the
//! flexion sample, and inside each wing plane two rays at the recovered
//! planar angles are truncated at unit length to give the outer corners.
//! Triangles fill the gaps between consecutive wings. The construction is
//! validated by the cone-closure test: the angle between the two rays at
//! each base vertex must equal the recovered `βᵢ` for every sample — this
//! is the geometric witness that the parameterized flexion is an isometric
//! deformation.
//!
//! Around the base polygon the dihedral variables appear in the order
//! `φ, ψ₂, θ, ψ₁` (the coupling system enumerates the vertices with the
//! opposite orientation to the edge-name order); a wing on a `φ/θ` edge
//! meets its end vertices with the `α` angles, a wing on a `ψ` edge with
//! the `γ` angles. Angles stored on the `(π, 2π)` branch put the ray on the
//! far side of the edge, producing a wing with a reflex corner.

use crate::flexion::{FlexionSample, Sign};
use crate::planar::{normalize_enumeration, BaseAngles, PlanarError, PolyhedronSpec};
use crate::Real;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EmbedError {
    #[error("base polygon does not close: {0}")]
    NoClosure(&'static str),
    #[error("cone closure failed at vertex {vertex}: measured {measured}, expected {expected}")]
    ClosureFailure { vertex: usize, measured: f64, expected: f64 },
    #[error(transparent)]
    Planar(#[from] PlanarError),
}

/// Minimal 3-vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec3<F> {
    pub x: F,
    pub y: F,
    pub z: F,
}

impl<F: Real> Vec3<F> {
    pub fn new(x: F, y: F, z: F) -> Self {
        Vec3 { x, y, z }
    }

    pub fn zero() -> Self {
        Vec3::new(F::zero(), F::zero(), F::zero())
    }

    pub fn add(self, o: Self) -> Self {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }

    pub fn sub(self, o: Self) -> Self {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    pub fn scale(self, s: F) -> Self {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn dot(self, o: Self) -> F {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> F {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Self {
        self.scale(F::one() / self.norm())
    }
}

/// The base quadrilateral realized in the plane `z = 0` with `ℓ₁ = ℓ₂ = 1`.
#[derive(Clone, Debug)]
pub struct BaseRealization<F> {
    pub vertices: [Vec3<F>; 4],
    pub lengths: [F; 4],
}

/// Place the base polygon: first vertex at the origin, first edge along
/// `+x`, edge directions fixed by the interior angles, `ℓ₃` and `ℓ₄` solved
/// from the planar closure system.
pub fn realize_base<F: Real>(b: &BaseAngles<F>) -> Result<BaseRealization<F>, EmbedError> {
    let mut headings = [F::zero(); 4];
    for i in 1..4 {
        headings[i] = headings[i - 1] + (F::PI() - b.deltas[i]);
    }
    let dir = |i: usize| Vec3::new(headings[i].cos(), headings[i].sin(), F::zero());
    let e: [Vec3<F>; 4] = std::array::from_fn(dir);
    // l3 e3 + l4 e4 = -(e1 + e2)
    let det = e[2].x * e[3].y - e[2].y * e[3].x;
    if det.abs() < F::lit(1e-12) {
        return Err(EmbedError::NoClosure("singular closure system"));
    }
    let rhs = Vec3::zero().sub(e[0].add(e[1]));
    let l3 = (rhs.x * e[3].y - rhs.y * e[3].x) / det;
    let l4 = (e[2].x * rhs.y - e[2].y * rhs.x) / det;
    if l3 <= F::lit(1e-9) || l4 <= F::lit(1e-9) {
        return Err(EmbedError::NoClosure("non-positive side length"));
    }
    let lengths = [F::one(), F::one(), l3, l4];
    let mut vertices = [Vec3::zero(); 4];
    for i in 0..3 {
        vertices[i + 1] = vertices[i].add(e[i].scale(lengths[i]));
    }
    // interior angles must re-measure to the inputs (reflex angles measure
    // as their 2π complement)
    for i in 0..4 {
        let p = vertices[(i + 3) % 4];
        let q = vertices[i];
        let r = vertices[(i + 1) % 4];
        let v1 = p.sub(q).normalized();
        let v2 = r.sub(q).normalized();
        let ang = v1.dot(v2).max(-F::one()).min(F::one()).acos();
        let expected = b.deltas[i].min(F::tau_full() - b.deltas[i]);
        if (ang - expected).abs() > F::lit(1e-9) {
            return Err(EmbedError::NoClosure("re-measured interior angle mismatch"));
        }
    }
    Ok(BaseRealization { vertices, lengths })
}

/// One realized configuration of the polyhedron.
#[derive(Clone, Debug)]
pub struct MeshFrame<F> {
    /// `A₁..A₄` then the wing corner pairs `(B at start, B at end)` per edge.
    pub vertices: Vec<Vec3<F>>,
    /// Base quad, four wings, four triangles (indices into `vertices`).
    pub faces: Vec<Vec<usize>>,
    pub t: F,
    pub branch: (Sign, Sign),
    /// Dihedral variable index (into φ, ψ₁, θ, ψ₂) carried by each base edge.
    pub edge_dihedral: [usize; 4],
    /// In-wing outward direction per base edge (the rotated edge normal).
    pub wing_direction: [Vec3<F>; 4],
}

/// Dihedral variables in polygon edge order `U₁U₂, U₂U₃, U₃U₄, U₄U₁`:
/// `φ, ψ₂, θ, ψ₁` as indices into the sample's `(φ, ψ₁, θ, ψ₂)`.
const EDGE_DIHEDRAL: [usize; 4] = [0, 3, 2, 1];

fn ray_angles<F: Real>(spec: &PolyhedronSpec<F>, edge: usize) -> (F, F) {
    let i0 = edge;
    let i1 = (edge + 1) % 4;
    if EDGE_DIHEDRAL[edge] == 0 || EDGE_DIHEDRAL[edge] == 2 {
        (spec.quads[i0].alpha, spec.quads[i1].alpha)
    } else {
        (spec.quads[i0].gamma, spec.quads[i1].gamma)
    }
}

/// Build one frame from a normalized spec, its base realization and a
/// flexion sample; verifies cone closure at every vertex to 1e−8.
pub fn build_frame<F: Real>(
    spec: &PolyhedronSpec<F>,
    base: &BaseRealization<F>,
    sample: &FlexionSample<F>,
) -> Result<MeshFrame<F>, EmbedError> {
    let spec = normalize_enumeration(spec)?;
    let dihedrals = sample.dihedrals();
    let up = Vec3::new(F::zero(), F::zero(), F::one());

    let mut vertices: Vec<Vec3<F>> = base.vertices.to_vec();
    let mut rays_prev: [Vec3<F>; 4] = [Vec3::zero(); 4];
    let mut rays_next: [Vec3<F>; 4] = [Vec3::zero(); 4];
    let mut wing_direction: [Vec3<F>; 4] = [Vec3::zero(); 4];
    for edge in 0..4 {
        let p = base.vertices[edge];
        let q = base.vertices[(edge + 1) % 4];
        let e = q.sub(p).normalized();
        let outward = e.cross(up);
        let chi = dihedrals[EDGE_DIHEDRAL[edge]];
        let d = outward.scale(chi.cos()).sub(up.scale(chi.sin()));
        wing_direction[edge] = d;
        let (th0, th1) = ray_angles(&spec, edge);
        let r0 = e.scale(th0.cos()).add(d.scale(th0.sin()));
        let r1 = e.scale(-th1.cos()).add(d.scale(th1.sin()));
        rays_next[edge] = r0;
        rays_prev[(edge + 1) % 4] = r1;
        vertices.push(p.add(r0));
        vertices.push(q.add(r1));
    }
    // cone closure: the measured angle between the rays is the recovered β
    for v in 0..4 {
        let measured = rays_prev[v].dot(rays_next[v]).max(-F::one()).min(F::one()).acos();
        let expected = spec.quads[v].beta;
        if (measured - expected).abs() > F::lit(1e-8) {
            return Err(EmbedError::ClosureFailure {
                vertex: v,
                measured: measured.to_f64().unwrap_or(f64::NAN),
                expected: expected.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    let corner = |edge: usize, end: usize| 4 + 2 * edge + end;
    let mut faces = vec![vec![0, 1, 2, 3]];
    for edge in 0..4 {
        faces.push(vec![edge, (edge + 1) % 4, corner(edge, 1), corner(edge, 0)]);
    }
    for v in 0..4 {
        // triangle between the wing arriving at v and the wing leaving v
        faces.push(vec![v, corner((v + 3) % 4, 1), corner(v, 0)]);
    }
    Ok(MeshFrame {
        vertices,
        faces,
        t: sample.t,
        branch: (sample.branch.sigma, sample.branch.rho),
        edge_dihedral: EDGE_DIHEDRAL,
        wing_direction,
    })
}

impl<F: Real> MeshFrame<F> {
    /// Every undirected edge of the mesh, deduplicated and sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for face in &self.faces {
            for i in 0..face.len() {
                let a = face[i];
                let b = face[(i + 1) % face.len()];
                let key = (a.min(b), a.max(b));
                if !out.contains(&key) {
                    out.push(key);
                }
            }
        }
        out.sort();
        out
    }

    pub fn edge_lengths(&self) -> Vec<F> {
        self.edges()
            .into_iter()
            .map(|(a, b)| self.vertices[b].sub(self.vertices[a]).norm())
            .collect()
    }

    /// Interior corner angles of every face, in face order.
    pub fn face_angles(&self) -> Vec<F> {
        let mut out = Vec::new();
        for face in &self.faces {
            let n = face.len();
            for i in 0..n {
                let p = self.vertices[face[(i + n - 1) % n]];
                let q = self.vertices[face[i]];
                let r = self.vertices[face[(i + 1) % n]];
                let v1 = p.sub(q).normalized();
                let v2 = r.sub(q).normalized();
                out.push(v1.dot(v2).max(-F::one()).min(F::one()).acos());
            }
        }
        out
    }

    /// Max distance of a face vertex from the plane of its first three.
    pub fn max_planarity_defect(&self) -> F {
        let mut worst = F::zero();
        for face in &self.faces {
            if face.len() < 4 {
                continue;
            }
            let a = self.vertices[face[0]];
            let b = self.vertices[face[1]];
            let c = self.vertices[face[2]];
            let n = b.sub(a).cross(c.sub(a)).normalized();
            for &v in &face[3..] {
                worst = worst.max(self.vertices[v].sub(a).dot(n).abs());
            }
        }
        worst
    }

    /// Re-measure the signed exterior dihedral angle at base edge `j` from
    /// the realized wing plane.
    pub fn measure_base_dihedral(&self, edge: usize) -> F {
        let up = Vec3::new(F::zero(), F::zero(), F::one());
        let p = self.vertices[edge];
        let q = self.vertices[(edge + 1) % 4];
        let e = q.sub(p).normalized();
        let outward = e.cross(up);
        let d = self.wing_direction[edge];
        let sin = outward.cross(d).dot(e);
        let cos = outward.dot(d);
        sin.atan2(cos)
    }

    /// Oriented dihedral angles at the eight wing–triangle edges, two per
    /// vertex: `(from the wing arriving at Aᵢ, from the wing leaving Aᵢ)`,
    /// each in `[0, 2π)`.
    pub fn wing_edge_angles(&self) -> [F; 8] {
        let mut out = [F::zero(); 8];
        for v in 0..4 {
            let a = self.vertices[v];
            let prev_corner = self.vertices[4 + 2 * ((v + 3) % 4) + 1];
            let next_corner = self.vertices[4 + 2 * v];
            let r_prev = prev_corner.sub(a).normalized();
            let r_next = next_corner.sub(a).normalized();
            // wing faces contain the base edge directions
            let e_prev = self.vertices[v].sub(self.vertices[(v + 3) % 4]).normalized();
            let e_next = self.vertices[(v + 1) % 4].sub(self.vertices[v]).normalized();
            let dihedral = |axis: Vec3<F>, d1: Vec3<F>, d2: Vec3<F>| -> F {
                let p1 = d1.sub(axis.scale(d1.dot(axis))).normalized();
                let p2 = d2.sub(axis.scale(d2.dot(axis))).normalized();
                let ang = p1.cross(p2).dot(axis).atan2(p1.dot(p2));
                ang.rem_two_pi()
            };
            // edge A_v → prev corner: between the arriving wing and the triangle
            out[2 * v] = dihedral(r_prev, e_prev.scale(-F::one()), r_next);
            // edge A_v → next corner: between the leaving wing and the triangle
            out[2 * v + 1] = dihedral(r_next, e_next, r_prev);
        }
        out
    }
}

/// Constancy report over a collection of frames.
#[derive(Clone, Debug)]
pub struct IsometryReport<F> {
    pub max_edge_deviation: F,
    pub max_angle_deviation: F,
    pub frames: usize,
}

impl<F: Real> IsometryReport<F> {
    pub fn pass(&self) -> bool {
        self.max_edge_deviation <= F::lit(1e-8) && self.max_angle_deviation <= F::lit(1e-8)
    }
}

/// Max deviation of every edge length and face corner angle across frames.
pub fn verify_isometry<F: Real>(frames: &[MeshFrame<F>]) -> IsometryReport<F> {
    assert!(!frames.is_empty());
    let ref_lengths = frames[0].edge_lengths();
    let ref_angles = frames[0].face_angles();
    let mut max_edge = F::zero();
    let mut max_angle = F::zero();
    for frame in frames {
        for (a, b) in frame.edge_lengths().iter().zip(&ref_lengths) {
            max_edge = max_edge.max((*a - *b).abs());
        }
        for (a, b) in frame.face_angles().iter().zip(&ref_angles) {
            max_angle = max_angle.max((*a - *b).abs());
        }
    }
    IsometryReport {
        max_edge_deviation: max_edge,
        max_angle_deviation: max_angle,
        frames: frames.len(),
    }
}

/// Wavefront OBJ text for one frame: vertices with 9 decimals, 1-indexed
/// faces.
pub fn obj_text<F: Real>(frame: &MeshFrame<F>) -> String {
    let mut out = String::new();
    for v in &frame.vertices {
        out.push_str(&format!(
            "v {:.9} {:.9} {:.9}\n",
            v.x.to_f64().unwrap_or(f64::NAN),
            v.y.to_f64().unwrap_or(f64::NAN),
            v.z.to_f64().unwrap_or(f64::NAN)
        ));
    }
    for face in &frame.faces {
        out.push('f');
        for idx in face {
            out.push_str(&format!(" {}", idx + 1));
        }
        out.push('\n');
    }
    out
}

pub const MANIFEST_HEADER: &str = "frame,t,branch,phi,psi1,theta,psi2";

pub fn manifest_row<F: Real>(index: usize, sample: &FlexionSample<F>) -> String {
    use crate::flexion::fmt12;
    format!(
        "{},{},{}{},{},{},{},{}",
        index,
        fmt12(sample.t),
        sample.branch.sigma.as_char(),
        sample.branch.rho.as_char(),
        fmt12(sample.phi),
        fmt12(sample.psi1),
        fmt12(sample.theta),
        fmt12(sample.psi2)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flexion::{flexion_elementary, reduce, Branch};
    use crate::planar::construct_spec;
    use approx::assert_abs_diff_eq;

    fn sec7_spec() -> PolyhedronSpec<f64> {
        let base = BaseAngles::new([1.36292, 1.41009, 1.80327, 1.70691]).unwrap();
        construct_spec(&base, -(60.0f64).atan(), None).unwrap()
    }

    #[test]
    fn base_realization_re_measures() {
        let base = BaseAngles::new([1.36292, 1.41009, 1.80327, 1.70691]).unwrap();
        let r = realize_base(&base).unwrap();
        assert!(r.lengths.iter().all(|&l| l > 0.0));
        // near-square perturbation gives near-unit lengths
        let eps = 0.07;
        let sq = BaseAngles::new([
            std::f64::consts::FRAC_PI_2 + eps,
            std::f64::consts::FRAC_PI_2 - eps,
            std::f64::consts::FRAC_PI_2 + eps,
            std::f64::consts::FRAC_PI_2 - eps,
        ])
        .unwrap();
        let r = realize_base(&sq).unwrap();
        for l in r.lengths {
            assert!((l - 1.0).abs() < 0.2, "length {l}");
        }
    }

    #[test]
    fn base_realization_rejects_straight_vertex() {
        // δ₄ = π makes the closure system singular
        let mut deltas = [1.0, 1.2, 0.0, std::f64::consts::PI];
        deltas[2] = 2.0 * std::f64::consts::PI - deltas[0] - deltas[1] - deltas[3];
        let b = BaseAngles { deltas };
        assert!(matches!(realize_base(&b), Err(EmbedError::NoClosure(_))));
    }

    #[test]
    fn frame_round_trips_dihedrals_and_closes() {
        let spec = sec7_spec();
        let rc = reduce(&spec).unwrap();
        let base = realize_base(&spec.base).unwrap();
        for &t in &[0.3, 0.9, 2.0, 4.5] {
            let sample = flexion_elementary(&rc, Branch::ALL[0], t);
            let frame = build_frame(&spec, &base, &sample).unwrap();
            let d = sample.dihedrals();
            for edge in 0..4 {
                let measured = frame.measure_base_dihedral(edge);
                let input = d[frame.edge_dihedral[edge]];
                let diff = crate::elliptic::circular_distance(measured, input);
                assert!(diff < 1e-9, "edge {edge}: measured {measured} vs {input}");
            }
            assert!(frame.max_planarity_defect() < 1e-8);
        }
    }

    #[test]
    fn cone_closure_rejects_perturbed_samples() {
        let spec = sec7_spec();
        let rc = reduce(&spec).unwrap();
        let base = realize_base(&spec.base).unwrap();
        let mut sample = flexion_elementary(&rc, Branch::ALL[0], 0.7);
        sample.phi += 1e-4;
        sample.z = crate::Proj::from_real((sample.phi / 2.0).tan());
        let err = build_frame(&spec, &base, &sample).unwrap_err();
        assert!(matches!(err, EmbedError::ClosureFailure { .. }));
    }

    #[test]
    fn isometry_across_flexion() {
        let spec = sec7_spec();
        let rc = reduce(&spec).unwrap();
        let base = realize_base(&spec.base).unwrap();
        let frames: Vec<_> = (0..100)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / 100.0;
                build_frame(&spec, &base, &flexion_elementary(&rc, Branch::ALL[0], t)).unwrap()
            })
            .collect();
        let report = verify_isometry(&frames);
        assert!(
            report.pass(),
            "edge dev {:e}, angle dev {:e}",
            report.max_edge_deviation,
            report.max_angle_deviation
        );

        // negative control: a displaced corner breaks the constancy
        let mut bad = frames[0].clone();
        bad.vertices[4].x += 1e-3;
        let report = verify_isometry(&[frames[0].clone(), bad]);
        assert!(!report.pass());
        assert!(report.max_edge_deviation > 1e-4);
    }

    #[test]
    fn single_frame_has_zero_deviation() {
        let spec = sec7_spec();
        let rc = reduce(&spec).unwrap();
        let base = realize_base(&spec.base).unwrap();
        let f = build_frame(&spec, &base, &flexion_elementary(&rc, Branch::ALL[0], 0.4)).unwrap();
        let report = verify_isometry(&[f.clone(), f]);
        assert_abs_diff_eq!(report.max_edge_deviation, 0.0);
        assert_abs_diff_eq!(report.max_angle_deviation, 0.0);
    }

    #[test]
    fn wing_edges_flatten_simultaneously() {
        let spec = sec7_spec();
        let rc = reduce(&spec).unwrap();
        let base = realize_base(&spec.base).unwrap();
        let flat_dist = |a: f64| {
            let m = a.rem_euclid(std::f64::consts::PI);
            m.min(std::f64::consts::PI - m)
        };
        // ψ₂ event at 3π/4: the ψ₂ base edge and the wing edges of the two
        // quads coupled through w₁'s branch value flatten together
        let t = 3.0 * std::f64::consts::FRAC_PI_4;
        let frame = build_frame(&spec, &base, &flexion_elementary(&rc, Branch::ALL[0], t)).unwrap();
        let w = frame.wing_edge_angles();
        assert!(flat_dist(w[1]) < 1e-7, "vertex 1 leaving-wing edge: {}", w[1]);
        assert!(flat_dist(w[6]) < 1e-7, "vertex 4 arriving-wing edge: {}", w[6]);
        // θ event at π/4
        let t = std::f64::consts::FRAC_PI_4;
        let frame = build_frame(&spec, &base, &flexion_elementary(&rc, Branch::ALL[0], t)).unwrap();
        let w = frame.wing_edge_angles();
        assert!(flat_dist(w[0]) < 1e-7, "vertex 1 arriving-wing edge: {}", w[0]);
        assert!(flat_dist(w[3]) < 1e-7, "vertex 2 leaving-wing edge: {}", w[3]);
        // generic parameter: all eight wing edges away from flat
        let frame = build_frame(&spec, &base, &flexion_elementary(&rc, Branch::ALL[0], 0.6)).unwrap();
        for a in frame.wing_edge_angles() {
            assert!(flat_dist(a) > 1e-3, "unexpected flat edge at generic t: {a}");
        }
    }

    #[test]
    fn obj_output_shape() {
        let spec = sec7_spec();
        let rc = reduce(&spec).unwrap();
        let base = realize_base(&spec.base).unwrap();
        let f = build_frame(&spec, &base, &flexion_elementary(&rc, Branch::ALL[0], 0.0)).unwrap();
        let text = obj_text(&f);
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 12);
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 9);
        // 9 decimals in vertex lines
        let first = text.lines().next().unwrap();
        assert!(first.split_whitespace().nth(1).unwrap().split('.').nth(1).unwrap().len() == 9);
    }
}
