//! Seeded generators of test bodies.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::angular::ShellRegion;
use super::cone::ConeBase;
use super::profile::{CircleGrid, RadialProfile, RidgeTerm};
use super::StarBody;
use crate::error::Result;
use crate::solve::brent;
use crate::spaces::{Curvature, Direction, SpaceSpec};

pub fn random_direction<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Direction {
    loop {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        if let Ok(d) = Direction::normalized(v) {
            return d;
        }
    }
}

fn radius_cap(space: &SpaceSpec) -> f64 {
    match space.curvature() {
        Curvature::Spherical => 1.45,
        Curvature::Flat => 2.5,
        Curvature::Hyperbolic => 1.8,
    }
}

/// A smooth, non-ellipsoidal star body `ρ = b · exp(Σ a_i ⟨u, d_i⟩^{p_i})`
/// with one to three terms. Symmetric bodies use even powers only; other
/// bodies have at least one odd power.
pub fn random_ridge<R: Rng + ?Sized>(rng: &mut R, space: SpaceSpec, symmetric: bool) -> Result<StarBody> {
    let n = space.dim();
    let count = rng.random_range(1..=3);
    let terms: Vec<RidgeTerm> = (0..count)
        .map(|i| {
            let power = if symmetric {
                2 * rng.random_range(1..=2)
            } else if i == 0 {
                2 * rng.random_range(0..=1) + 1
            } else {
                rng.random_range(1..=3)
            };
            RidgeTerm {
                direction: random_direction(rng, n),
                amplitude: rng.random_range(-0.4..0.4),
                power,
                threshold: None,
            }
        })
        .collect();
    let spread: f64 = terms.iter().map(|t| t.amplitude.abs()).sum();
    let cap = radius_cap(&space);
    let base = rng.random_range(0.35..0.9) * cap / spread.exp();
    StarBody::new(space, RadialProfile::Ridge { base, terms }, symmetric)
}

/// A centered ellipsoid in `R^n` with semiaxes in `[0.4, 2]`.
pub fn random_ellipsoid<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<StarBody> {
    let axes: Vec<f64> = (0..n).map(|_| rng.random_range(0.4..2.0)).collect();
    super::construct::make_ellipsoid(axes)
}

/// An origin-symmetric convex body in `S^2_+`: an axis-aligned gnomonic
/// ellipse or an intersection of one to three symmetric gnomonic slabs.
pub fn random_convex_spherical<R: Rng + ?Sized>(rng: &mut R) -> Result<StarBody> {
    let space = SpaceSpec::hemisphere(2)?;
    let profile = if rng.random_bool(0.5) {
        let (a, b) = (rng.random_range(0.2..4.0), rng.random_range(0.2..4.0));
        RadialProfile::GnomonicEllipsoid { semiaxes: vec![a, b] }
    } else {
        let k = rng.random_range(1..=3);
        let mut normals = Vec::with_capacity(k);
        let mut heights = Vec::with_capacity(k);
        for _ in 0..k {
            let a: f64 = rng.random_range(0.0..PI);
            normals.push(Direction::new(vec![a.cos(), a.sin()])?);
            heights.push(rng.random_range(0.15..3.0));
        }
        RadialProfile::GnomonicSlabs { normals, heights }
    };
    StarBody::new(space, profile, true)
}

/// A star-shaped cone in `S^n_+` over one to four random zonal bands.
pub fn random_zonal_cone<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<StarBody> {
    let k = rng.random_range(1..=4);
    let mut cuts: Vec<f64> = (0..2 * k).map(|_| rng.random_range(-1.0..1.0)).collect();
    cuts.sort_by(f64::total_cmp);
    let bands: Vec<[f64; 2]> = cuts.chunks(2).map(|c| [c[0], c[1]]).collect();
    let base = ConeBase::zonal(random_direction(rng, n), bands)?;
    super::construct::make_cone(n, base)
}

/// A planar profile on `nodes` grid points around a random smooth curve.
pub fn random_grid<R: Rng + ?Sized>(rng: &mut R, space: SpaceSpec, nodes: usize, symmetric: bool) -> Result<StarBody> {
    let cap = radius_cap(&space);
    let base = rng.random_range(0.4..0.7) * cap;
    let modes: Vec<(usize, f64, f64)> = (1..=4)
        .filter(|m| !symmetric || m % 2 == 0)
        .map(|m| (m, rng.random_range(-0.12..0.12), rng.random_range(0.0..TAU)))
        .collect();
    let values: Vec<f64> = (0..nodes)
        .map(|j| {
            let p = TAU * j as f64 / nodes as f64;
            base * (1.0
                + modes
                    .iter()
                    .map(|(m, a, ph)| a * (*m as f64 * p + ph).cos())
                    .sum::<f64>())
        })
        .collect();
    StarBody::new(space, RadialProfile::Grid(CircleGrid { values }), symmetric)
}

/// A pair `(K, K̃)` of planar grid bodies in `S^2_+` where `K̃` adds a bump
/// where `ρ_K` is large and removes an equal area where `ρ_K` is small.
pub fn random_exchange_pair<R: Rng + ?Sized>(rng: &mut R) -> Result<(RadialProfile, RadialProfile)> {
    let nodes = 720;
    let c = rng.random_range(0.5..0.9);
    let a = rng.random_range(0.1..0.3);
    let phase: f64 = rng.random_range(0.0..TAU);
    let angle = |j: usize| TAU * j as f64 / nodes as f64;
    let rho: Vec<f64> = (0..nodes).map(|j| c + a * (angle(j) - phase).cos()).collect();
    let half_plus = rng.random_range(0.2..0.8);
    let half_minus = rng.random_range(0.2..0.8);
    let bump = |j: usize, center: f64, half: f64| -> f64 {
        let d = (angle(j) - center + PI).rem_euclid(TAU) - PI;
        if d.abs() < half {
            (FRAC_PI_2 * d / half).cos().powi(2)
        } else {
            0.0
        }
    };
    let k = RadialProfile::Grid(CircleGrid { values: rho.clone() });
    let up = rng.random_range(0.05..0.2);
    let build = |down: f64| -> RadialProfile {
        let values = (0..nodes)
            .map(|j| rho[j] + up * bump(j, phase, half_plus) - down * bump(j, phase + PI, half_minus))
            .collect();
        RadialProfile::Grid(CircleGrid { values })
    };
    let gained = ShellRegion::difference(&build(0.0), &k).volume()?;
    let down = brent(
        |d| ShellRegion::difference(&k, &build(d)).volume().unwrap_or(f64::NAN) - gained,
        0.0,
        c - a - 0.05,
        1e-15,
        200,
    )?;
    Ok((k, build(down)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::is_convex_spherical;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_produce_valid_bodies() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for space in [
            SpaceSpec::hemisphere(2).unwrap(),
            SpaceSpec::hemisphere(3).unwrap(),
            SpaceSpec::hyperbolic(3).unwrap(),
            SpaceSpec::euclidean(2).unwrap(),
        ] {
            for sym in [true, false] {
                random_ridge(&mut rng, space, sym).unwrap();
            }
        }
        random_zonal_cone(&mut rng, 4).unwrap();
        random_grid(&mut rng, SpaceSpec::hyperbolic(2).unwrap(), 64, true).unwrap();
    }

    #[test]
    fn convex_generator_passes_convexity_test() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for i in 0..10 {
            let b = random_convex_spherical(&mut rng).unwrap();
            assert!(is_convex_spherical(&b, 1000, i), "{:?}", b.profile());
        }
    }

    #[test]
    fn exchange_pair_matches_areas() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (k, kt) = random_exchange_pair(&mut rng).unwrap();
        let g = ShellRegion::difference(&kt, &k).volume().unwrap();
        let l = ShellRegion::difference(&k, &kt).volume().unwrap();
        assert!((g - l).abs() < 1e-10 * g);
    }
}
