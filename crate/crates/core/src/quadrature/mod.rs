//! Sphere rules, great-subsphere rules and adaptive interval integration.

mod adaptive;
mod rules;

pub use adaptive::{
    integrate_adaptive, integrate_pieces, integrate_radial, integrate_toward_unit, AdaptiveOptions, Integral,
};
pub use rules::{gauss_jacobi_symmetric, sphere_area, SphereRule, SubsphereRule, DEFAULT_NODE_CAP};

/// Default polynomial exactness for rules on `S^m`.
pub fn default_degree(m: usize) -> usize {
    if m <= 1 {
        47
    } else {
        23
    }
}
