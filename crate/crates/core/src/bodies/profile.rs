use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use super::cone::ConeBase;
use crate::error::{Error, Result};
use crate::harmonics::ZonalHarmonic;
use crate::spaces::Direction;

/// One factor `exp(amplitude · g(⟨u, direction⟩))` of a [`RadialProfile::Ridge`].
///
/// Without a threshold `g(t) = t^power`; with threshold `h` it is the
/// localized bump `((t - h)_+ / (1 - h))^power`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RidgeTerm {
    pub direction: Direction,
    pub amplitude: f64,
    pub power: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

impl RidgeTerm {
    fn g(&self, u: &[f64]) -> f64 {
        let t = self.direction.dot(u);
        match self.threshold {
            None => t.powi(self.power as i32),
            Some(h) => ((t - h).max(0.0) / (1.0 - h)).powi(self.power as i32),
        }
    }

    fn range(&self) -> (f64, f64) {
        if self.threshold.is_none() && self.power % 2 == 1 {
            (-1.0, 1.0)
        } else {
            (0.0, 1.0)
        }
    }
}

/// Parameters of the zonal perturbation `ρ = r + α + β H_k(⟨u, axis⟩)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "HarmonicParams", into = "HarmonicParams")]
pub struct HarmonicProfile {
    params: HarmonicParams,
    harmonic: ZonalHarmonic<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicParams {
    pub r: f64,
    pub alpha: f64,
    pub beta: f64,
    pub degree: usize,
    pub axis: Direction,
}

impl TryFrom<HarmonicParams> for HarmonicProfile {
    type Error = Error;

    fn try_from(params: HarmonicParams) -> Result<Self> {
        let harmonic = ZonalHarmonic::new(params.axis.dim(), params.degree, params.axis.as_slice())?;
        Ok(Self { params, harmonic })
    }
}

impl From<HarmonicProfile> for HarmonicParams {
    fn from(h: HarmonicProfile) -> Self {
        h.params
    }
}

impl PartialEq for HarmonicProfile {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params
    }
}

impl HarmonicProfile {
    pub fn new(params: HarmonicParams) -> Result<Self> {
        params.try_into()
    }

    pub fn params(&self) -> &HarmonicParams {
        &self.params
    }

    pub fn harmonic(&self) -> &ZonalHarmonic<f64> {
        &self.harmonic
    }

    /// The perturbation `f = α + β H_k` as a function of `t = ⟨u, axis⟩`.
    pub fn perturbation(&self, t: f64) -> f64 {
        self.params.alpha + self.params.beta * self.harmonic.profile(t)
    }
}

/// A radial function on `S^1` interpolated linearly in angle between the
/// nodes `ψ_j = 2πj/N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleGrid {
    pub values: Vec<f64>,
}

impl CircleGrid {
    pub fn node_angle(&self, j: usize) -> f64 {
        TAU * j as f64 / self.values.len() as f64
    }

    pub fn eval_angle(&self, psi: f64) -> f64 {
        let n = self.values.len();
        let x = psi.rem_euclid(TAU) / TAU * n as f64;
        let j = (x.floor() as usize).min(n - 1);
        let f = x - j as f64;
        self.values[j] * (1.0 - f) + self.values[(j + 1) % n] * f
    }
}

/// The radial function `ρ_K` of a body, as a function on the unit sphere of
/// the tangent space at the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialProfile {
    Ball {
        r: f64,
    },
    /// Euclidean ellipsoid with the given semi-axes along the coordinate axes.
    Ellipsoid {
        semiaxes: Vec<f64>,
    },
    /// Hemisphere body whose gnomonic image is a coordinate ellipsoid.
    GnomonicEllipsoid {
        semiaxes: Vec<f64>,
    },
    /// Hemisphere body whose gnomonic image is `∩ {|⟨x, n_i⟩| ≤ h_i}`.
    GnomonicSlabs {
        normals: Vec<Direction>,
        heights: Vec<f64>,
    },
    /// Planar lune `tan ρ = tan w / |⟨u, axis⟩|`.
    Lune {
        w: f64,
        axis: Direction,
    },
    /// `ρ = radius` on the base and `0` elsewhere.
    Cone {
        base: ConeBase,
        radius: f64,
    },
    /// `ρ = base · exp(Σ a_i g_i)`.
    Ridge {
        base: f64,
        terms: Vec<RidgeTerm>,
    },
    Harmonic(HarmonicProfile),
    Grid(CircleGrid),
}

impl RadialProfile {
    pub fn kind(&self) -> &'static str {
        match self {
            RadialProfile::Ball { .. } => "ball",
            RadialProfile::Ellipsoid { .. } => "ellipsoid",
            RadialProfile::GnomonicEllipsoid { .. } => "gnomonic_ellipsoid",
            RadialProfile::GnomonicSlabs { .. } => "gnomonic_slabs",
            RadialProfile::Lune { .. } => "lune",
            RadialProfile::Cone { .. } => "cone",
            RadialProfile::Ridge { .. } => "ridge",
            RadialProfile::Harmonic(_) => "harmonic",
            RadialProfile::Grid(_) => "grid",
        }
    }

    /// `ρ(u)` for a unit vector `u`.
    pub fn radial(&self, u: &[f64]) -> f64 {
        match self {
            RadialProfile::Ball { r } => *r,
            RadialProfile::Ellipsoid { semiaxes } => ellipsoid_radial(semiaxes, u),
            RadialProfile::GnomonicEllipsoid { semiaxes } => ellipsoid_radial(semiaxes, u).atan(),
            RadialProfile::GnomonicSlabs { normals, heights } => normals
                .iter()
                .zip(heights)
                .map(|(nrm, &h)| h.atan2(nrm.dot(u).abs()))
                .fold(FRAC_PI_2, f64::min),
            RadialProfile::Lune { w, axis } => w.tan().atan2(axis.dot(u).abs()),
            RadialProfile::Cone { base, radius } => {
                if base.contains(u) {
                    *radius
                } else {
                    0.0
                }
            }
            RadialProfile::Ridge { base, terms } => {
                base * terms.iter().map(|t| t.amplitude * t.g(u)).sum::<f64>().exp()
            }
            RadialProfile::Harmonic(h) => h.params.r + h.perturbation(h.params.axis.dot(u)),
            RadialProfile::Grid(g) => g.eval_angle(u[1].atan2(u[0])),
        }
    }

    /// `ρ(cos ψ, sin ψ)` for planar profiles.
    pub fn radial_angle(&self, psi: f64) -> f64 {
        match self {
            RadialProfile::Grid(g) => g.eval_angle(psi),
            RadialProfile::Cone { base, radius } => {
                if base.contains_angle(psi) {
                    *radius
                } else {
                    0.0
                }
            }
            _ => self.radial(&[psi.cos(), psi.sin()]),
        }
    }

    /// Angles in `[0, 2π)` where a planar profile may fail to be smooth.
    pub fn kinks(&self) -> Vec<f64> {
        let wrap = |a: f64| a.rem_euclid(TAU);
        let angle = |d: &Direction| d[1].atan2(d[0]);
        let mut out: Vec<f64> = match self {
            RadialProfile::Ball { .. }
            | RadialProfile::Ellipsoid { .. }
            | RadialProfile::GnomonicEllipsoid { .. }
            | RadialProfile::Harmonic(_) => Vec::new(),
            RadialProfile::Lune { axis, .. } => {
                vec![wrap(angle(axis) + FRAC_PI_2), wrap(angle(axis) - FRAC_PI_2)]
            }
            RadialProfile::GnomonicSlabs { normals, heights } => {
                let mut k: Vec<f64> = normals
                    .iter()
                    .flat_map(|d| [wrap(angle(d) + FRAC_PI_2), wrap(angle(d) - FRAC_PI_2)])
                    .collect();
                for i in 0..normals.len() {
                    for j in 0..i {
                        let (ai, aj) = (angle(&normals[i]), angle(&normals[j]));
                        for sign in [1.0, -1.0] {
                            let cc = heights[j] * ai.cos() - sign * heights[i] * aj.cos();
                            let cs = heights[j] * ai.sin() - sign * heights[i] * aj.sin();
                            let psi = (-cc).atan2(cs);
                            k.push(wrap(psi));
                            k.push(wrap(psi + PI));
                        }
                    }
                }
                k
            }
            RadialProfile::Cone { base, .. } => base.boundary_angles(),
            RadialProfile::Ridge { terms, .. } => terms
                .iter()
                .filter_map(|t| t.threshold.map(|h| (angle(&t.direction), h.clamp(-1.0, 1.0).acos())))
                .flat_map(|(a, w)| [wrap(a + w), wrap(a - w)])
                .collect(),
            RadialProfile::Grid(g) => (0..g.values.len()).map(|j| g.node_angle(j)).collect(),
        };
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        out
    }

    /// For profiles depending on `u` only through `⟨u, axis⟩`: the axis and
    /// the profile in `t = ⟨u, axis⟩`.
    pub fn zonal(&self, n: usize) -> Option<(Direction, Box<dyn Fn(f64) -> f64 + Send + Sync + '_>)> {
        match self {
            RadialProfile::Ball { r } => {
                let r = *r;
                Some((Direction::axis(n, n - 1), Box::new(move |_| r)))
            }
            RadialProfile::Harmonic(h) => {
                Some((h.params.axis.clone(), Box::new(move |t| h.params.r + h.perturbation(t))))
            }
            RadialProfile::Ridge { base, terms } if terms.len() == 1 && terms[0].direction.dim() == n => {
                let t0 = &terms[0];
                Some((
                    t0.direction.clone(),
                    Box::new(move |t| {
                        let g = match t0.threshold {
                            None => t.powi(t0.power as i32),
                            Some(h) => ((t - h).max(0.0) / (1.0 - h)).powi(t0.power as i32),
                        };
                        base * (t0.amplitude * g).exp()
                    }),
                ))
            }
            _ => None,
        }
    }

    /// Lower and upper bounds of `ρ` over the sphere (exact or conservative).
    pub fn bounds(&self) -> (f64, f64) {
        let min_max = |v: &[f64]| {
            v.iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)))
        };
        match self {
            RadialProfile::Ball { r } => (*r, *r),
            RadialProfile::Ellipsoid { semiaxes } => min_max(semiaxes),
            RadialProfile::GnomonicEllipsoid { semiaxes } => {
                let (a, b) = min_max(semiaxes);
                (a.atan(), b.atan())
            }
            RadialProfile::GnomonicSlabs { heights, .. } => {
                let (a, _) = min_max(heights);
                (a.atan(), FRAC_PI_2)
            }
            RadialProfile::Lune { w, .. } => (*w, FRAC_PI_2),
            RadialProfile::Cone { radius, .. } => (0.0, *radius),
            RadialProfile::Ridge { base, terms } => {
                let (lo, hi) = terms.iter().fold((0.0, 0.0), |(lo, hi), t| {
                    let (gl, gh) = t.range();
                    let (x, y) = (t.amplitude * gl, t.amplitude * gh);
                    (lo + x.min(y), hi + x.max(y))
                });
                (base * f64::exp(lo), base * f64::exp(hi))
            }
            RadialProfile::Harmonic(h) => {
                let peak = h.harmonic.profile(1.0).abs();
                let c = h.params.r + h.params.alpha;
                (c - h.params.beta.abs() * peak, c + h.params.beta.abs() * peak)
            }
            RadialProfile::Grid(g) => min_max(&g.values),
        }
    }

    /// Whether `ρ` may vanish on part of the sphere.
    pub fn is_cone_type(&self) -> bool {
        matches!(self, RadialProfile::Cone { .. })
    }

    /// Checks internal consistency against the ambient dimension `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        let check_dir = |d: &Direction, what: &'static str| {
            if d.dim() != n {
                Err(Error::domain(
                    what,
                    d.dim() as f64,
                    format!("expected a vector in R^{n}"),
                ))
            } else {
                Ok(())
            }
        };
        let positive = |v: &[f64], what: &'static str| {
            if v.len() != n {
                return Err(Error::domain(what, v.len() as f64, format!("expected {n} entries")));
            }
            match v.iter().find(|&&a| !(a > 0.0 && a.is_finite())) {
                Some(&a) => Err(Error::domain(what, a, "entries must be positive")),
                None => Ok(()),
            }
        };
        match self {
            RadialProfile::Ball { r } if !(*r > 0.0) => Err(Error::domain("r", *r, "radius must be positive")),
            RadialProfile::Ball { .. } => Ok(()),
            RadialProfile::Ellipsoid { semiaxes } | RadialProfile::GnomonicEllipsoid { semiaxes } => {
                positive(semiaxes, "semiaxes")
            }
            RadialProfile::GnomonicSlabs { normals, heights } => {
                if normals.len() != heights.len() || normals.is_empty() {
                    return Err(Error::Precondition("one height per slab normal is required".into()));
                }
                normals.iter().try_for_each(|d| check_dir(d, "normal"))?;
                match heights.iter().find(|&&h| !(h > 0.0)) {
                    Some(&h) => Err(Error::domain("height", h, "slab heights must be positive")),
                    None => Ok(()),
                }
            }
            RadialProfile::Lune { w, axis } => {
                if n != 2 {
                    return Err(Error::Unsupported("lunes are planar (n = 2)".into()));
                }
                check_dir(axis, "axis")?;
                if !(*w > 0.0 && *w < FRAC_PI_2) {
                    return Err(Error::domain("w", *w, "need 0 < w < pi/2"));
                }
                Ok(())
            }
            RadialProfile::Cone { base, radius } => {
                base.validate(n)?;
                if !(*radius > 0.0) {
                    return Err(Error::domain("radius", *radius, "cone radius must be positive"));
                }
                Ok(())
            }
            RadialProfile::Ridge { base, terms } => {
                if !(*base > 0.0) {
                    return Err(Error::domain("base", *base, "must be positive"));
                }
                for t in terms {
                    check_dir(&t.direction, "direction")?;
                    if let Some(h) = t.threshold {
                        if !(-1.0 < h && h < 1.0) {
                            return Err(Error::domain("threshold", h, "need -1 < h < 1"));
                        }
                    }
                    if t.power == 0 || !t.amplitude.is_finite() {
                        return Err(Error::domain(
                            "power",
                            t.power as f64,
                            "need power >= 1 and finite amplitude",
                        ));
                    }
                }
                Ok(())
            }
            RadialProfile::Harmonic(h) => check_dir(&h.params.axis, "axis"),
            RadialProfile::Grid(g) => {
                if n != 2 {
                    return Err(Error::Unsupported("grid profiles are planar (n = 2)".into()));
                }
                if g.values.len() < 3 {
                    return Err(Error::domain("grid size", g.values.len() as f64, "need >= 3 nodes"));
                }
                Ok(())
            }
        }
    }
}

fn ellipsoid_radial(semiaxes: &[f64], u: &[f64]) -> f64 {
    let q: f64 = u.iter().zip(semiaxes).map(|(x, a)| (x / a).powi(2)).sum();
    q.sqrt().recip()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ellipsoid_axis_values() {
        let p = RadialProfile::Ellipsoid {
            semiaxes: vec![2.0, 1.0, 0.5],
        };
        assert!((p.radial(&[1.0, 0.0, 0.0]) - 2.0).abs() < 1e-15);
        assert!((p.radial(&[0.0, 0.0, 1.0]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn lune_extremes() {
        let p = RadialProfile::Lune {
            w: 0.3,
            axis: Direction::axis(2, 0),
        };
        assert!((p.radial(&[1.0, 0.0]) - 0.3).abs() < 1e-15);
        assert!((p.radial(&[-1.0, 0.0]) - 0.3).abs() < 1e-15);
        assert!((p.radial(&[0.0, 1.0]) - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(p.kinks().len(), 2);
    }

    #[test]
    fn slabs_reduce_to_lune() {
        let axis = Direction::normalized(vec![1.0, 2.0]).unwrap();
        let lune = RadialProfile::Lune {
            w: 0.4,
            axis: axis.clone(),
        };
        let slabs = RadialProfile::GnomonicSlabs {
            normals: vec![axis],
            heights: vec![0.4f64.tan()],
        };
        for k in 0..50 {
            let psi = 0.13 * k as f64;
            assert!((lune.radial_angle(psi) - slabs.radial_angle(psi)).abs() < 1e-14);
        }
    }

    #[test]
    fn slab_crossings_are_kinks() {
        let p = RadialProfile::GnomonicSlabs {
            normals: vec![Direction::axis(2, 0), Direction::axis(2, 1)],
            heights: vec![1.0, 1.0],
        };
        let k = p.kinks();
        assert!(k.iter().any(|&a| (a - PI / 4.0).abs() < 1e-12));
    }

    #[test]
    fn ridge_bounds_are_conservative() {
        let p = RadialProfile::Ridge {
            base: 0.5,
            terms: vec![
                RidgeTerm {
                    direction: Direction::axis(3, 0),
                    amplitude: 0.3,
                    power: 2,
                    threshold: None,
                },
                RidgeTerm {
                    direction: Direction::axis(3, 2),
                    amplitude: -0.2,
                    power: 3,
                    threshold: Some(0.5),
                },
            ],
        };
        let (lo, hi) = p.bounds();
        for k in 0..200 {
            let a = 0.1 * k as f64;
            let b = 0.037 * k as f64;
            let u = [a.cos() * b.sin(), a.sin() * b.sin(), b.cos()];
            let r = p.radial(&u);
            assert!(lo <= r && r <= hi);
        }
    }

    #[test]
    fn grid_interpolates_linearly() {
        let g = CircleGrid {
            values: vec![1.0, 2.0, 3.0, 2.0],
        };
        assert!((g.eval_angle(PI / 4.0) - 1.5).abs() < 1e-15);
        assert!((g.eval_angle(TAU - 1e-12) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn json_round_trip() {
        let p = RadialProfile::Harmonic(
            HarmonicProfile::new(HarmonicParams {
                r: 0.7,
                alpha: -0.01,
                beta: 0.05,
                degree: 2,
                axis: Direction::axis(3, 2),
            })
            .unwrap(),
        );
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"kind\":\"harmonic\""));
        let q: RadialProfile = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
        let u = [0.6, 0.0, 0.8];
        assert_eq!(p.radial(&u), q.radial(&u));
    }
}
