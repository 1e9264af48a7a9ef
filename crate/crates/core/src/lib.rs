//! Star bodies in hyperbolic space, Euclidean space and the closed
//! hemisphere, described by radial functions.
//!
//! The crate evaluates volumes, hyperplane sections and the intersection
//! functional `∫_{S^{n-1}} vol(K ∩ ξ^⊥)^n dξ`, together with the closed-form
//! bounds of the Busemann-type inequalities in these spaces, and provides
//! the constructions (cones, lunes, striped cones, perturbed balls) that
//! attain or approach them.
//!
//! The metric, quadrature and harmonic layers are generic over [`Real`]
//! (`f32` or `f64`); bodies and functionals work in `f64`.

mod error;
mod scalar;
mod solve;

pub mod bodies;
pub mod functionals;
pub mod harmonics;
pub mod quadrature;
pub mod spaces;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{pairwise_sum, Real};
pub use solve::{brent, invert_increasing};
pub use spaces::{Curvature, Direction, SpaceSpec};

pub type SphereRule = quadrature::SphereRule<f64>;
pub type SubsphereRule = quadrature::SubsphereRule<f64>;
