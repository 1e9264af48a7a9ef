use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bodies::random::random_grid;
use crate::bodies::{is_convex_euclidean, is_convex_spherical, CircleGrid, RadialProfile, StarBody};
use crate::error::{Error, Result};
use crate::functionals::{intersection_functional, volume, FunctionalOptions, Sense};
use crate::solve::brent;
use crate::spaces::{phi, phi_inverse, Curvature, SpaceSpec};

/// Admissible bodies of a search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchClass {
    pub convex: bool,
    pub symmetric: bool,
}

impl fmt::Display for SearchClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = if self.symmetric { "sym-" } else { "" };
        let kind = if self.convex { "convex" } else { "star" };
        write!(f, "{sym}{kind}")
    }
}

impl FromStr for SearchClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "star" => Ok(Self {
                convex: false,
                symmetric: false,
            }),
            "sym-star" => Ok(Self {
                convex: false,
                symmetric: true,
            }),
            "convex" => Ok(Self {
                convex: true,
                symmetric: false,
            }),
            "sym-convex" => Ok(Self {
                convex: true,
                symmetric: true,
            }),
            other => Err(Error::Parse(format!(
                "unknown class '{other}' (known: star, sym-star, convex, sym-convex)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchSettings {
    pub space: SpaceSpec,
    pub class: SearchClass,
    pub volume: f64,
    /// `Upper` maximizes the functional, `Lower` minimizes it.
    pub sense: Sense,
    pub budget: usize,
    pub seed: u64,
    pub nodes: usize,
    /// Initial bump amplitude relative to the mean radius.
    pub step: f64,
    /// Half width of a bump, in grid nodes.
    pub bump_width: usize,
    /// Start from the ball of the given volume instead of a random profile.
    pub start_ball: bool,
}

impl SearchSettings {
    pub fn new(space: SpaceSpec, class: SearchClass, volume: f64, sense: Sense, budget: usize, seed: u64) -> Self {
        Self {
            space,
            class,
            volume,
            sense,
            budget,
            seed,
            nodes: 64,
            step: 0.05,
            bump_width: 6,
            start_ball: class.convex,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchStep {
    pub iteration: usize,
    pub objective: f64,
    pub volume_drift: f64,
    pub step: f64,
    pub accepted: bool,
    /// Grid values after an accepted step.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub profile: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchTrace {
    pub settings: SearchSettings,
    pub initial_objective: f64,
    pub steps: Vec<SearchStep>,
    pub best: StarBody,
    pub best_objective: f64,
}

impl SearchTrace {
    pub fn accepted(&self) -> usize {
        self.steps.iter().filter(|s| s.accepted).count()
    }

    /// Largest relative volume drift over accepted steps.
    pub fn max_drift(&self) -> f64 {
        self.steps
            .iter()
            .filter(|s| s.accepted)
            .map(|s| s.volume_drift)
            .fold(0.0, f64::max)
    }
}

const DRIFT_TOL: f64 = 1e-8;

struct Problem<'a> {
    settings: &'a SearchSettings,
    opts: FunctionalOptions,
}

impl Problem<'_> {
    fn body(&self, values: Vec<f64>) -> Result<StarBody> {
        let s = self.settings;
        StarBody::new(s.space, RadialProfile::Grid(CircleGrid { values }), s.class.symmetric)
    }

    fn volume(&self, values: &[f64]) -> Result<f64> {
        Ok(volume(&self.body(values.to_vec())?, None)?.value)
    }

    /// Rescales `φ_2(ρ_j)` by a common factor so that the volume is exact.
    fn renormalize(&self, values: &[f64]) -> Result<Option<(Vec<f64>, f64)>> {
        let space = &self.settings.space;
        let target = self.settings.volume;
        let phis: Vec<f64> = values.iter().map(|&r| phi(space, 2, r)).collect::<Result<_>>()?;
        let cap = match space.curvature() {
            Curvature::Spherical => phi(space, 2, space.max_radius())?,
            _ => f64::INFINITY,
        };
        let top = phis.iter().fold(0.0_f64, |a, &b| a.max(b));
        let scaled = |kappa: f64| -> Result<Vec<f64>> {
            phis.iter()
                .map(|&p| phi_inverse(space, 2, (kappa * p).min(cap)))
                .collect()
        };
        let gap = |kappa: f64| -> f64 {
            match scaled(kappa).and_then(|v| self.volume(&v)) {
                Ok(v) => v - target,
                Err(_) => f64::NAN,
            }
        };
        let guess = target / self.volume(values)?;
        let hi_limit = if cap.is_finite() { cap / top } else { f64::INFINITY };
        let (mut lo, mut hi) = (guess * 0.9, (guess * 1.1).min(hi_limit));
        let (mut glo, mut ghi) = (gap(lo), gap(hi));
        let mut tries = 0;
        while !(glo <= 0.0 && ghi >= 0.0) {
            tries += 1;
            if tries > 40 || !glo.is_finite() || !ghi.is_finite() {
                return Ok(None);
            }
            if glo > 0.0 {
                lo *= 0.5;
                glo = gap(lo);
            }
            if ghi < 0.0 {
                if hi >= hi_limit {
                    return Ok(None);
                }
                hi = (hi * 2.0).min(hi_limit);
                ghi = gap(hi);
            }
        }
        let kappa = match brent(gap, lo, hi, 1e-15, 200) {
            Ok(k) => k,
            Err(_) => return Ok(None),
        };
        let out = scaled(kappa)?;
        let drift = (self.volume(&out)? - target).abs() / target;
        Ok(Some((out, drift)))
    }

    fn objective(&self, values: &[f64]) -> Result<f64> {
        Ok(intersection_functional(&self.body(values.to_vec())?, &self.opts)?.value)
    }

    fn admissible(&self, values: &[f64], seed: u64) -> Result<bool> {
        let s = self.settings;
        let max = s.space.max_radius();
        if values.iter().any(|&r| !(r > 1e-6 && r < max)) {
            return Ok(false);
        }
        if !s.class.convex {
            return Ok(true);
        }
        let body = self.body(values.to_vec())?;
        Ok(match s.space.curvature() {
            Curvature::Spherical => is_convex_spherical(&body, 400, seed),
            _ => is_convex_euclidean(&body, 400, seed),
        })
    }

    fn better(&self, a: f64, b: f64) -> bool {
        match self.settings.sense {
            Sense::Upper => a > b,
            Sense::Lower => a < b,
        }
    }
}

fn bump(nodes: usize, center: usize, half: usize, j: usize) -> f64 {
    let d = (j as isize - center as isize).rem_euclid(nodes as isize);
    let d = d.min(nodes as isize - d) as f64;
    let w = half as f64 + 1.0;
    if d < w {
        (0.5 * PI * d / w).cos().powi(2)
    } else {
        0.0
    }
}

/// Volume-preserving local search over planar grid profiles.
///
/// Each move raises the profile by a smooth bump at one node and lowers it
/// at another (at antipodal nodes as well for symmetric classes), then
/// rescales `φ_2(ρ)` to restore the volume. A move is kept when it improves
/// the functional, keeps the volume within `1e-8` relative and, for convex
/// classes, passes the convexity test. The bump size grows after accepted
/// moves and shrinks after rejected ones.
pub fn extremizer_search(settings: &SearchSettings) -> Result<SearchTrace> {
    let s = settings;
    if s.space.dim() != 2 {
        return Err(Error::Unsupported(
            "the search works on planar grid profiles (n = 2)".into(),
        ));
    }
    if s.class.convex && s.space.curvature() == Curvature::Hyperbolic {
        return Err(Error::Applicability(
            "convex search is available in S^2_+ and R^2".into(),
        ));
    }
    if !(s.volume > 0.0 && s.volume.is_finite()) {
        return Err(Error::domain("volume", s.volume, "need a positive finite volume"));
    }
    if s.space.curvature() == Curvature::Spherical && s.volume >= TAU {
        return Err(Error::domain(
            "volume",
            s.volume,
            "must be below the hemisphere volume 2π",
        ));
    }
    let min_nodes = if s.class.symmetric { 8 } else { 4 };
    if s.nodes < min_nodes || (s.class.symmetric && s.nodes % 2 != 0) {
        return Err(Error::domain(
            "nodes",
            s.nodes as f64,
            "need at least 8 nodes, even for symmetric classes",
        ));
    }
    if !(s.step > 0.0) {
        return Err(Error::domain("step", s.step, "need a positive step"));
    }
    let problem = Problem {
        settings: s,
        opts: FunctionalOptions::default(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let start = if s.start_ball {
        let r = phi_inverse(&s.space, 2, s.volume / TAU)?;
        vec![r; s.nodes]
    } else {
        match random_grid(&mut rng, s.space, s.nodes, s.class.symmetric)?.profile() {
            RadialProfile::Grid(g) => g.values.clone(),
            _ => unreachable!(),
        }
    };
    let (mut current, _) = problem
        .renormalize(&start)?
        .ok_or_else(|| Error::Solver("could not rescale the starting profile to the requested volume".into()))?;
    let mut value = problem.objective(&current)?;
    let initial_objective = value;
    let mut step = s.step;
    let mut steps = Vec::with_capacity(s.budget);
    let n = s.nodes;
    for iteration in 0..s.budget {
        let up = rng.random_range(0..n);
        let down = rng.random_range(0..n);
        let size = step * rng.random_range(0.25..1.0);
        let check_seed: u64 = rng.random();
        let mean = current.iter().sum::<f64>() / n as f64;
        let mut trial = current.clone();
        for (j, v) in trial.iter_mut().enumerate() {
            let mut d = bump(n, up, s.bump_width, j) - bump(n, down, s.bump_width, j);
            if s.class.symmetric {
                d += bump(n, (up + n / 2) % n, s.bump_width, j) - bump(n, (down + n / 2) % n, s.bump_width, j);
            }
            *v += size * mean * d;
        }
        let mut record = SearchStep {
            iteration,
            objective: value,
            volume_drift: 0.0,
            step,
            accepted: false,
            profile: None,
        };
        let candidate = if up == down || !problem.admissible(&trial, check_seed)? {
            None
        } else {
            problem.renormalize(&trial)?
        };
        if let Some((fixed, drift)) = candidate {
            record.volume_drift = drift;
            if drift <= DRIFT_TOL && problem.admissible(&fixed, check_seed)? {
                let obj = problem.objective(&fixed)?;
                record.objective = obj;
                if problem.better(obj, value) {
                    record.accepted = true;
                    record.profile = Some(fixed.clone());
                    current = fixed;
                    value = obj;
                }
            }
        }
        step = if record.accepted {
            (step * 1.2).min(0.2)
        } else {
            (step * 0.95).max(1e-5)
        };
        steps.push(record);
    }
    Ok(SearchTrace {
        settings: s.clone(),
        initial_objective,
        steps,
        best: problem.body(current)?,
        best_objective: value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_names_round_trip() {
        for name in ["star", "sym-star", "convex", "sym-convex"] {
            assert_eq!(name.parse::<SearchClass>().unwrap().to_string(), name);
        }
        assert!("blob".parse::<SearchClass>().is_err());
    }

    #[test]
    fn search_is_reproducible_and_keeps_volume() {
        let space = SpaceSpec::hemisphere(2).unwrap();
        let class = "sym-star".parse().unwrap();
        let mut settings = SearchSettings::new(space, class, 2.0, Sense::Upper, 40, 5);
        settings.nodes = 32;
        let a = extremizer_search(&settings).unwrap();
        let b = extremizer_search(&settings).unwrap();
        assert_eq!(a, b);
        assert!(a.max_drift() <= DRIFT_TOL);
        assert!(a.best_objective >= a.initial_objective);
        let v = volume(&a.best, None).unwrap().value;
        assert!((v - 2.0).abs() < 1e-8 * 2.0);
    }

    #[test]
    fn rejects_bad_settings() {
        let h = SpaceSpec::hyperbolic(2).unwrap();
        let convex = SearchClass {
            convex: true,
            symmetric: false,
        };
        assert!(extremizer_search(&SearchSettings::new(h, convex, 1.0, Sense::Upper, 1, 0)).is_err());
        let h3 = SpaceSpec::hyperbolic(3).unwrap();
        let star = SearchClass {
            convex: false,
            symmetric: false,
        };
        assert!(extremizer_search(&SearchSettings::new(h3, star, 1.0, Sense::Upper, 1, 0)).is_err());
    }
}
