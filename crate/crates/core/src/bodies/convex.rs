use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::cone::ConeBase;
use super::profile::RadialProfile;
use super::StarBody;
use crate::spaces::{gnomonic_radial, Curvature};

const FAR: f64 = 1e6;

fn unit(v: &[f64]) -> Option<Vec<f64>> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (norm > 1e-300).then(|| v.iter().map(|x| x / norm).collect())
}

fn cone_is_convex(base: &ConeBase, n: usize) -> bool {
    match base {
        ConeBase::Arcs { arcs } => {
            let total: f64 = arcs.iter().map(|a| a[1] - a[0]).sum();
            total >= TAU - 1e-12 || (arcs.len() == 1 && arcs[0][1] - arcs[0][0] <= PI + 1e-12)
        }
        ConeBase::Zonal { bands, .. } => {
            let full = bands.iter().any(|b| b[0] <= -1.0 && b[1] >= 1.0);
            full || (bands.len() == 1 && bands[0][0] >= 0.0 && bands[0][1] >= 1.0 && n >= 2)
        }
    }
}

/// Numerical convexity test for a body in `S^n_+`.
///
/// The body is convex iff its gnomonic image (radial function `tan ρ`) is
/// convex. The image is truncated at radius `10^6` and `samples` pairs of
/// boundary points are tested for midpoint convexity with relative
/// tolerance `1e-9`; half of the pairs are close together to catch local
/// dents. Cones are decided from their base instead.
pub fn is_convex_spherical(body: &StarBody, samples: usize, seed: u64) -> bool {
    if body.space().curvature() != Curvature::Spherical {
        return false;
    }
    let n = body.dim();
    if let RadialProfile::Cone { base, .. } = body.profile() {
        return cone_is_convex(base, n);
    }
    let (lo, _) = body.profile().bounds();
    if !(lo > 0.0) {
        return false;
    }
    midpoint_convex(
        body,
        |u| gnomonic_radial(body.radial(u).min(FRAC_PI_2)).min(FAR),
        samples,
        seed,
    )
}

/// Midpoint convexity test for a body in `R^n`, with the same sampling as
/// [`is_convex_spherical`].
pub fn is_convex_euclidean(body: &StarBody, samples: usize, seed: u64) -> bool {
    if body.space().curvature() != Curvature::Flat {
        return false;
    }
    let (lo, _) = body.profile().bounds();
    if !(lo > 0.0) {
        return false;
    }
    midpoint_convex(body, |u| body.radial(u), samples, seed)
}

fn midpoint_convex(body: &StarBody, image: impl Fn(&[f64]) -> f64, samples: usize, seed: u64) -> bool {
    let n = body.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_dir = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
            if let Some(u) = unit(&v) {
                return u;
            }
        }
    };
    let mut pairs: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(samples + 64);
    if n == 2 {
        for a in body.profile().kinks() {
            for d in [0.05, 0.3, 1.0] {
                pairs.push((vec![(a - d).cos(), (a - d).sin()], vec![(a + d).cos(), (a + d).sin()]));
            }
        }
    }
    for i in 0..samples {
        let u = random_dir(&mut rng);
        let v = if i % 2 == 0 {
            random_dir(&mut rng)
        } else {
            let s: f64 = rng.random_range(1e-3..0.3);
            let w = random_dir(&mut rng);
            let mixed: Vec<f64> = u.iter().zip(&w).map(|(a, b)| a + s * b).collect();
            match unit(&mixed) {
                Some(v) => v,
                None => continue,
            }
        };
        pairs.push((u, v));
    }
    pairs.iter().all(|(u, v)| {
        let (ru, rv) = (image(u), image(v));
        let m: Vec<f64> = u.iter().zip(v).map(|(a, b)| 0.5 * (ru * a + rv * b)).collect();
        let len = m.iter().map(|x| x * x).sum::<f64>().sqrt();
        match unit(&m) {
            None => true,
            Some(dir) => len <= image(&dir) * (1.0 + 1e-9) + 1e-12,
        }
    })
}
