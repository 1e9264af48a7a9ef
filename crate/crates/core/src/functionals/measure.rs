use std::fmt;
use std::sync::Arc;

use statrs::function::erf::erf;
use statrs::function::gamma::gamma_lr;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_adaptive, sphere_area, AdaptiveOptions};
use crate::solve::invert_increasing;
use crate::spaces::{phi, phi_inverse, sine_unchecked, Curvature, SpaceSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DensityKind {
    Uniform,
    Gaussian,
    Custom,
}

type DensityFn = Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>;

/// A radially symmetric, decreasing density `f_m(r)` defining a measure on
/// the space and on its hyperplanes. `m` is the dimension of the set being
/// measured: the Gaussian uses the standard normal density of `R^m`, the
/// other kinds ignore it.
#[derive(Clone)]
pub struct RadialDensityMeasure {
    kind: DensityKind,
    label: String,
    density: DensityFn,
}

impl fmt::Debug for RadialDensityMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialDensityMeasure")
            .field("kind", &self.kind)
            .field("label", &self.label)
            .finish()
    }
}

impl RadialDensityMeasure {
    pub fn uniform() -> Self {
        Self {
            kind: DensityKind::Uniform,
            label: "uniform".into(),
            density: Arc::new(|_, _| 1.0),
        }
    }

    pub fn gaussian() -> Self {
        Self {
            kind: DensityKind::Gaussian,
            label: "gaussian".into(),
            density: Arc::new(|m, r| (2.0 * std::f64::consts::PI).powf(-(m as f64) / 2.0) * (-r * r / 2.0).exp()),
        }
    }

    /// A custom density, checked to be positive and nonincreasing on a
    /// 1000-point grid of `[0, 20]`.
    pub fn custom<F>(label: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let mut prev = f64::INFINITY;
        for i in 0..1000 {
            let r = 20.0 * i as f64 / 999.0;
            let v = f(r);
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain("density", v, "must be positive and finite"));
            }
            if v > prev {
                return Err(Error::domain(
                    "density",
                    r,
                    "density must be nonincreasing in the radius",
                ));
            }
            prev = v;
        }
        Ok(Self {
            kind: DensityKind::Custom,
            label: label.into(),
            density: Arc::new(move |_, r| f(r)),
        })
    }

    pub fn kind(&self) -> DensityKind {
        self.kind
    }

    pub fn name(&self) -> &str {
        &self.label
    }

    pub fn density(&self, m: usize, r: f64) -> f64 {
        (self.density)(m, r)
    }

    /// `ψ_m(x)`, the measure of the centered `m`-dimensional ball of radius `x`.
    pub fn ball_measure(&self, space: &SpaceSpec, m: usize, x: f64) -> Result<f64> {
        Ok(sphere_area::<f64>(m - 1) * self.radial_primitive(space, m, x)?)
    }

    /// `∫_0^x f_m(t) s_δ(t)^{m-1} dt`, so that `ψ_m = |S^{m-1}|` times this.
    pub fn radial_primitive(&self, space: &SpaceSpec, m: usize, x: f64) -> Result<f64> {
        if x.is_infinite() && x > 0.0 && self.kind == DensityKind::Gaussian && space.curvature() == Curvature::Flat {
            return Ok(1.0 / sphere_area::<f64>(m - 1));
        }
        space.check_radius(x)?;
        match (self.kind, space.curvature()) {
            (DensityKind::Uniform, _) => phi(space, m, x),
            (DensityKind::Gaussian, Curvature::Flat) => {
                let p = match m {
                    _ if x == 0.0 => 0.0,
                    1 => erf(x / std::f64::consts::SQRT_2),
                    2 => -(-x * x / 2.0).exp_m1(),
                    _ => gamma_lr(m as f64 / 2.0, x * x / 2.0),
                };
                Ok(p / sphere_area::<f64>(m - 1))
            }
            _ => {
                let c = space.curvature();
                let f = &self.density;
                let opts = AdaptiveOptions {
                    abs_tol: 1e-300,
                    rel_tol: 1e-13,
                    max_subdivisions: 4000,
                };
                Ok(integrate_adaptive(|t: f64| f(m, t) * sine_unchecked(c, t).powi(m as i32 - 1), 0.0, x, opts)?.value)
            }
        }
    }

    /// Supremum of `ψ_m` over admissible radii.
    pub fn total(&self, space: &SpaceSpec, m: usize) -> f64 {
        match (self.kind, space.curvature()) {
            (DensityKind::Gaussian, Curvature::Flat) => 1.0,
            (_, Curvature::Spherical) => self.ball_measure(space, m, space.max_radius()).unwrap_or(f64::NAN),
            _ => f64::INFINITY,
        }
    }

    /// Inverse of `ψ_m`.
    pub fn ball_measure_inverse(&self, space: &SpaceSpec, m: usize, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::domain("t", t, "measures are nonnegative"));
        }
        let total = self.total(space, m);
        if t >= total && !(space.curvature() == Curvature::Spherical && t == total) {
            return Err(Error::domain("t", t, format!("exceeds the total ball measure {total}")));
        }
        if self.kind == DensityKind::Uniform {
            return phi_inverse(space, m, t / sphere_area::<f64>(m - 1));
        }
        let hi = if space.curvature() == Curvature::Spherical {
            space.max_radius()
        } else {
            f64::INFINITY
        };
        invert_increasing(
            |x| self.ball_measure(space, m, x).unwrap_or(f64::NAN),
            t,
            0.0,
            hi,
            1e-15,
        )
    }

    /// `Ψ = ψ_{n-1}^{n/(n-1)} ∘ ψ_n^{-1}`.
    pub fn psi_composite(&self, space: &SpaceSpec, t: f64) -> Result<f64> {
        let n = space.dim();
        let x = self.ball_measure_inverse(space, n, t)?;
        Ok(self.ball_measure(space, n - 1, x)?.powf(n as f64 / (n as f64 - 1.0)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_closed_forms() {
        let g = RadialDensityMeasure::gaussian();
        let e2 = SpaceSpec::euclidean(2).unwrap();
        for r in [0.3, 1.0, 2.5] {
            assert!((g.ball_measure(&e2, 2, r).unwrap() - (1.0 - f64::exp(-r * r / 2.0))).abs() < 1e-14);
            assert!((g.ball_measure(&e2, 1, r).unwrap() - erf(r / 2f64.sqrt())).abs() < 1e-14);
        }
        for n in 2..=5 {
            let e = SpaceSpec::euclidean(n).unwrap();
            assert!((g.ball_measure(&e, n, 40.0).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn gaussian_closed_form_matches_quadrature() {
        let g = RadialDensityMeasure::gaussian();
        let e3 = SpaceSpec::euclidean(3).unwrap();
        let f = RadialDensityMeasure::custom("g3", |r| (2.0 * std::f64::consts::PI).powf(-1.5) * (-r * r / 2.0).exp())
            .unwrap();
        let a = g.ball_measure(&e3, 3, 1.3).unwrap();
        let b = f.ball_measure(&e3, 3, 1.3).unwrap();
        assert!((a - b).abs() < 1e-13);
    }

    #[test]
    fn custom_density_must_decrease() {
        assert!(RadialDensityMeasure::custom("up", |r| 1.0 + r).is_err());
        assert!(RadialDensityMeasure::custom("down", |r| 1.0 / (1.0 + r * r)).is_ok());
    }

    #[test]
    fn inverse_round_trip() {
        let g = RadialDensityMeasure::gaussian();
        let h3 = SpaceSpec::hyperbolic(3).unwrap();
        let e3 = SpaceSpec::euclidean(3).unwrap();
        for space in [h3, e3] {
            let t = g.ball_measure(&space, 3, 0.8).unwrap();
            assert!((g.ball_measure_inverse(&space, 3, t).unwrap() - 0.8).abs() < 1e-11);
        }
    }

    #[test]
    fn psi_composite_is_concave() {
        use rand::{Rng, SeedableRng};
        let e3 = SpaceSpec::euclidean(3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for mu in [
            RadialDensityMeasure::gaussian(),
            RadialDensityMeasure::custom("cauchy", |r| 1.0 / (1.0 + r * r).powi(2)).unwrap(),
        ] {
            let top = mu.total(&e3, 3).min(5.0) * 0.999;
            for _ in 0..100 {
                let a = rng.random_range(0.0..top);
                let b = rng.random_range(0.0..top);
                let m = mu.psi_composite(&e3, 0.5 * (a + b)).unwrap();
                let avg = 0.5 * (mu.psi_composite(&e3, a).unwrap() + mu.psi_composite(&e3, b).unwrap());
                assert!(m >= avg - 1e-12);
            }
        }
    }
}
