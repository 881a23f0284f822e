//! Flexible Kokotsakis polyhedra of orthodiagonal anti-involutive type.
//!
//! A Kokotsakis polyhedron is a quadrilateral base face, a quadrilateral wing
//! attached to every side of the base and a triangle between each pair of
//! consecutive wings. Generic such surfaces are rigid; this crate constructs
//! the orthodiagonal anti-involutive family, which flexes, and provides
//!
//! * spherical-quadrilateral primitives (orthodiagonality, ellipticity,
//!   involution factors) in [`sphquad`],
//! * recovery of all planar angles from the base angles and one parameter
//!   `tau` in [`planar`],
//! * the one-parameter flexion in elementary functions in [`flexion`] and in
//!   Jacobi elliptic functions in [`elliptic`],
//! * biquadratic resultants, their factorization and branch sets in
//!   [`resultant`],
//! * a 3-space realization of the flexing surface with isometry checks in
//!   [`embed`],
//! * a screening of the admissible parameter space in [`screening`].
//!
//! All numeric code is generic over the scalar type through [`Real`];
//! concrete aliases for `f64` are exported at the crate root.

pub mod elliptic;
pub mod embed;
pub mod flexion;
pub mod planar;
pub mod proj;
pub mod resultant;
pub mod screening;
pub mod sphquad;

mod real;

pub use proj::Proj;
pub use real::Real;

/// Default scalar used by the command line tools.
pub type Scalar = f64;

pub type SphericalQuad64 = sphquad::SphericalQuad<f64>;
pub type InvolutionFactors64 = sphquad::InvolutionFactors<f64>;
pub type BaseAngles64 = planar::BaseAngles<f64>;
pub type PolyhedronSpec64 = planar::PolyhedronSpec<f64>;
pub type FlexionSample64 = flexion::FlexionSample<f64>;
pub type ReducedCoeffs64 = flexion::ReducedCoeffs<f64>;
