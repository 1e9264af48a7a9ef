use serde::{Deserialize, Serialize};

use crate::bodies::{make_striped_cone, ConeBase, StarBody};
use crate::error::{Error, Result};
use crate::functionals::{bound_constants, intersection_functional, volume, BoundKind, FunctionalOptions};
use crate::spaces::Direction;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpnessRow {
    pub alpha: f64,
    pub eps: f64,
    pub strips: usize,
    pub lambda: f64,
    pub volume: f64,
    pub functional: f64,
    pub functional_error: f64,
    /// `functional / volume^n`.
    pub normalized: f64,
    pub constant: f64,
    /// `normalized / constant - 1`.
    pub excess: f64,
}

/// Default `(α, ε)` schedule.
pub const DEFAULT_SCHEDULE: [(f64, f64); 5] = [(0.4, 1.0), (0.2, 0.8), (0.1, 0.6), (0.05, 0.5), (0.025, 0.4)];

/// Evaluates `vol^{-n} ∫ vol(K ∩ ξ^⊥)^n` on striped cones of volume `t`
/// times the hemisphere along the `(α, ε)` schedule.
pub fn sharpness_schedule(n: usize, t: f64, alphas: &[f64], epsilons: &[f64]) -> Result<Vec<SharpnessRow>> {
    if alphas.len() != epsilons.len() {
        return Err(Error::Precondition("alphas and epsilons must have equal length".into()));
    }
    let constant = bound_constants(BoundKind::SphericalMinimum, n)?;
    alphas
        .iter()
        .zip(epsilons)
        .map(|(&alpha, &eps)| {
            let cone = make_striped_cone(n, t, alpha, eps)?;
            let vol = volume(&cone.body, None)?.value;
            let f = intersection_functional(&cone.body, &FunctionalOptions::default())?;
            let normalized = f.value / vol.powi(n as i32);
            Ok(SharpnessRow {
                alpha,
                eps,
                strips: cone.cap.strips,
                lambda: cone.lambda,
                volume: vol,
                functional: f.value,
                functional_error: f.error,
                normalized,
                constant,
                excess: normalized / constant - 1.0,
            })
        })
        .collect()
}

/// The cone over `{x_n ∈ [-a, 0] ∪ [a, 1]}`: a cap together with the
/// reflection of its complement in the upper half. Every hyperplane
/// section meets exactly half of each great subsphere.
pub fn half_section_cone(n: usize, a: f64) -> Result<StarBody> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::domain("a", a, "need 0 < a < 1"));
    }
    let base = ConeBase::zonal(Direction::axis(n, n - 1), vec![[-a, 0.0], [a, 1.0]])?;
    crate::bodies::make_cone(n, base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::section_volume;
    use crate::quadrature::sphere_area;
    use std::f64::consts::PI;

    #[test]
    fn half_section_cone_sections_are_half() {
        let c = half_section_cone(3, 0.4).unwrap();
        for v in [[0.1, 0.0, 1.0], [0.6, 0.0, 0.8], [1.0, 0.0, 0.0], [0.3, 0.4, 0.866]] {
            let xi = Direction::normalized(v.to_vec()).unwrap();
            let s = section_volume(&c, &xi, None).unwrap();
            assert!((s - PI).abs() < 1e-12, "{v:?}: {s}");
        }
        let f = intersection_functional(&c, &FunctionalOptions::default())
            .unwrap()
            .value;
        let v = volume(&c, None).unwrap().value;
        let ratio = f / v.powi(3);
        assert!((ratio - 32.0 / (PI * PI)).abs() < 1e-8 * ratio);
        assert!((v - sphere_area::<f64>(2) * PI / 8.0).abs() < 1e-12);
    }
}
