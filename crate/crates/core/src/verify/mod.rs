//! Theorem suites, the perturbation sign experiment, sharpness schedules
//! and the extremizer search.

mod perturbation;
mod search;
mod sharpness;

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bodies::random::{
    random_convex_spherical, random_direction, random_ellipsoid, random_ridge, random_zonal_cone,
};
use crate::bodies::{make_ball, make_cone, make_lune, ConeBase, StarBody};
use crate::error::{Error, Result};
use crate::functionals::{check_theorem, CheckOptions, InequalityReport, TheoremId, REPORT_FORMAT_VERSION};
use crate::spaces::{Curvature, SpaceSpec};

pub use perturbation::{
    c5_constant, c_chain, perturbation_sign_experiment, CChain, PerturbationExperiment, PerturbationResult,
    DEFAULT_BETAS,
};
pub use search::{extremizer_search, SearchClass, SearchSettings, SearchStep, SearchTrace};
pub use sharpness::{half_section_cone, sharpness_schedule, SharpnessRow, DEFAULT_SCHEDULE};

/// A body that could not be checked.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteError {
    pub index: usize,
    pub body: String,
    pub message: String,
}

/// Reports of one theorem over a list of bodies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub format_version: u32,
    pub theorem_id: TheoremId,
    pub reports: Vec<InequalityReport>,
    pub errors: Vec<SuiteError>,
}

impl SuiteReport {
    /// True when every body was checked and passed.
    pub fn all_pass(&self) -> bool {
        self.errors.is_empty() && self.reports.iter().all(InequalityReport::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &InequalityReport> {
        self.reports.iter().filter(|r| !r.passed())
    }
}

/// Checks `theorem` on every body, in parallel. Bodies the theorem does not
/// apply to are listed in `errors`.
pub fn run_theorem_suite(theorem: TheoremId, bodies: &[StarBody], opts: &CheckOptions) -> SuiteReport {
    let results: Vec<Result<InequalityReport>> = bodies.par_iter().map(|b| check_theorem(theorem, b, opts)).collect();
    let mut reports = Vec::with_capacity(bodies.len());
    let mut errors = Vec::new();
    for (index, (res, body)) in results.into_iter().zip(bodies).enumerate() {
        match res {
            Ok(r) => reports.push(r),
            Err(e) => errors.push(SuiteError {
                index,
                body: body.profile().kind().to_string(),
                message: e.to_string(),
            }),
        }
    }
    SuiteReport {
        format_version: REPORT_FORMAT_VERSION,
        theorem_id: theorem,
        reports,
        errors,
    }
}

/// The space a theorem is stated in, at dimension `n`.
pub fn theorem_space(theorem: TheoremId, n: usize) -> Result<SpaceSpec> {
    let space = match theorem {
        TheoremId::BusemannEuclidean | TheoremId::Gaussian => SpaceSpec::euclidean(n)?,
        TheoremId::Hyperbolic => SpaceSpec::hyperbolic(n)?,
        _ => SpaceSpec::hemisphere(n)?,
    };
    theorem.check_space(&space)?;
    Ok(space)
}

/// Equality-case bodies of `theorem` in `space`.
pub fn equality_bodies(theorem: TheoremId, space: SpaceSpec) -> Result<Vec<StarBody>> {
    theorem.check_space(&space)?;
    let n = space.dim();
    match theorem {
        TheoremId::BusemannEuclidean => [0.5, 1.0, 1.5].iter().map(|&r| make_ball(space, r)).collect(),
        TheoremId::Hyperbolic => [0.3, 0.7, 1.2].iter().map(|&r| make_ball(space, r)).collect(),
        TheoremId::Gaussian => [0.5, 1.0, 2.0].iter().map(|&r| make_ball(space, r)).collect(),
        TheoremId::SphericalConcave | TheoremId::SphericalCrude => {
            [0.3, 0.8].iter().map(|&r| make_ball(space, r)).collect()
        }
        TheoremId::Min2d => [0.2, 0.7, FRAC_PI_2].iter().map(|&r| make_ball(space, r)).collect(),
        TheoremId::ConeMax => [
            vec![[0.0, 2.0 * PI]],
            vec![[-0.4, 0.4], [PI - 0.4, PI + 0.4]],
            vec![[0.1, 0.5], [1.0, 2.0], [PI + 0.1, PI + 0.5], [PI + 1.0, PI + 2.0]],
        ]
        .into_iter()
        .map(|arcs| make_cone(2, ConeBase::arcs(arcs)?))
        .collect(),
        TheoremId::LuneMax => [0.2, 0.5, 1.0]
            .iter()
            .map(|&w| make_lune(w, crate::spaces::Direction::axis(2, 0)))
            .collect(),
        TheoremId::MinNd => [0.3, 0.6].iter().map(|&a| half_section_cone(n, a)).collect(),
    }
}

/// `count` seeded random bodies admissible for `theorem` in `space`.
pub fn random_bodies(theorem: TheoremId, space: SpaceSpec, count: usize, seed: u64) -> Result<Vec<StarBody>> {
    theorem.check_space(&space)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = space.dim();
    (0..count)
        .map(|i| match theorem {
            TheoremId::BusemannEuclidean if i % 2 == 1 => random_ellipsoid(&mut rng, n),
            TheoremId::Min2d | TheoremId::ConeMax => random_ridge(&mut rng, space, true),
            TheoremId::LuneMax => random_convex_spherical(&mut rng),
            TheoremId::MinNd if i % 2 == 1 => random_zonal_cone(&mut rng, n),
            _ => random_ridge(&mut rng, space, false),
        })
        .collect()
}

/// Uniform Monte Carlo estimate of the volume of a body in `R^n`, with its
/// standard error.
pub fn monte_carlo_volume(body: &StarBody, samples: usize, seed: u64) -> Result<(f64, f64)> {
    if body.space().curvature() != Curvature::Flat {
        return Err(Error::Unsupported("Monte Carlo volumes are for bodies in R^n".into()));
    }
    if samples == 0 {
        return Err(Error::domain("samples", 0.0, "need at least one sample"));
    }
    let n = body.dim();
    let (_, hi) = body.profile().bounds();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..samples {
        let u = random_direction(&mut rng, n);
        let r = hi * rng.random::<f64>().powf(1.0 / n as f64);
        if r <= body.radial(u.as_slice()) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    let ball = crate::spaces::unit_ball_volume::<f64>(n) * hi.powi(n as i32);
    Ok((p * ball, ball * (p * (1.0 - p) / samples as f64).sqrt()))
}
