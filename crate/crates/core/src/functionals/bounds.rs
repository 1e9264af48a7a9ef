use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use super::integrals::{intersection_functional, volume_with, FunctionalOptions, QuadratureConfig};
use super::measure::RadialDensityMeasure;
use super::special::{f_spherical, h_hyperbolic};
use crate::bodies::StarBody;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_adaptive, sphere_area, AdaptiveOptions};
use crate::spaces::{unit_ball_volume, Curvature, SpaceSpec};

/// Version tag of serialized reports.
pub const REPORT_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `n κ_{n-1}^n / κ_n^{n-2}`.
    Busemann,
    /// `|S^{n-1}|^{n-1} n² 2^{n(n-1)} (1 - 1/n)^n κ_{n-1}^n / κ_n^{n-2}`.
    Hyperbolic,
    /// `2^{n-1} n κ_{n-1}^n / κ_n^{n-2}`.
    SphericalCrude,
    /// `2 Γ((n+1)/2)^n / Γ(n/2)^{n+1}`.
    SphericalMinimum,
}

pub fn bound_constants(kind: BoundKind, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("n", n as f64, "need n >= 2"));
    }
    let nf = n as f64;
    let busemann =
        || nf * unit_ball_volume::<f64>(n - 1).powi(n as i32) / unit_ball_volume::<f64>(n).powi(n as i32 - 2);
    Ok(match kind {
        BoundKind::Busemann => busemann(),
        BoundKind::Hyperbolic => {
            sphere_area::<f64>(n - 1).powi(n as i32 - 1)
                * nf
                * nf
                * 2f64.powi((n * (n - 1)) as i32)
                * (1.0 - 1.0 / nf).powi(n as i32)
                * unit_ball_volume::<f64>(n - 1).powi(n as i32)
                / unit_ball_volume::<f64>(n).powi(n as i32 - 2)
        }
        BoundKind::SphericalCrude => 2f64.powi(n as i32 - 1) * busemann(),
        BoundKind::SphericalMinimum => {
            if n < 3 {
                return Err(Error::Unsupported("the spherical minimum constant needs n >= 3".into()));
            }
            2.0 * gamma((nf + 1.0) / 2.0).powi(n as i32) / gamma(nf / 2.0).powi(n as i32 + 1)
        }
    })
}

/// The inequalities that can be checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    #[serde(rename = "busemann-euclidean")]
    BusemannEuclidean,
    #[serde(rename = "hyperbolic")]
    Hyperbolic,
    #[serde(rename = "prop4.1")]
    SphericalConcave,
    #[serde(rename = "prop4.2")]
    SphericalCrude,
    #[serde(rename = "min2d")]
    Min2d,
    #[serde(rename = "cone-max")]
    ConeMax,
    #[serde(rename = "lune-max")]
    LuneMax,
    #[serde(rename = "min-nd")]
    MinNd,
    #[serde(rename = "gaussian")]
    Gaussian,
}

/// Which side of the functional the bound sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Upper,
    Lower,
}

impl TheoremId {
    pub const ALL: [TheoremId; 9] = [
        TheoremId::BusemannEuclidean,
        TheoremId::Hyperbolic,
        TheoremId::SphericalConcave,
        TheoremId::SphericalCrude,
        TheoremId::Min2d,
        TheoremId::ConeMax,
        TheoremId::LuneMax,
        TheoremId::MinNd,
        TheoremId::Gaussian,
    ];

    pub fn id(self) -> &'static str {
        match self {
            TheoremId::BusemannEuclidean => "busemann-euclidean",
            TheoremId::Hyperbolic => "hyperbolic",
            TheoremId::SphericalConcave => "prop4.1",
            TheoremId::SphericalCrude => "prop4.2",
            TheoremId::Min2d => "min2d",
            TheoremId::ConeMax => "cone-max",
            TheoremId::LuneMax => "lune-max",
            TheoremId::MinNd => "min-nd",
            TheoremId::Gaussian => "gaussian",
        }
    }

    /// Descriptive alternatives accepted by [`FromStr`].
    pub fn aliases(self) -> &'static [&'static str] {
        match self {
            TheoremId::BusemannEuclidean => &["euclidean"],
            TheoremId::Hyperbolic => &["hyperbolic-max"],
            TheoremId::SphericalConcave => &["spherical-concave"],
            TheoremId::SphericalCrude => &["spherical-crude"],
            TheoremId::Min2d => &["sphere2-min"],
            TheoremId::ConeMax => &["sphere2-cone"],
            TheoremId::LuneMax => &["sphere2-lune"],
            TheoremId::MinNd => &["sphere-min"],
            TheoremId::Gaussian => &["measure"],
        }
    }

    pub fn sense(self) -> Sense {
        match self {
            TheoremId::Min2d | TheoremId::MinNd => Sense::Lower,
            _ => Sense::Upper,
        }
    }

    /// Exponent on the section measure in the left side.
    pub fn exponent(self, n: usize) -> f64 {
        match self {
            TheoremId::SphericalConcave => 1.0,
            _ => n as f64,
        }
    }

    pub fn requires_symmetry(self) -> bool {
        matches!(self, TheoremId::Min2d | TheoremId::ConeMax | TheoremId::LuneMax)
    }

    /// Checks that the theorem speaks about bodies in `space`.
    pub fn check_space(self, space: &SpaceSpec) -> Result<()> {
        let n = space.dim();
        let c = space.curvature();
        let ok = match self {
            TheoremId::BusemannEuclidean => c == Curvature::Flat,
            TheoremId::Hyperbolic => c == Curvature::Hyperbolic,
            TheoremId::SphericalConcave | TheoremId::SphericalCrude => c == Curvature::Spherical,
            TheoremId::Min2d | TheoremId::ConeMax | TheoremId::LuneMax => c == Curvature::Spherical && n == 2,
            TheoremId::MinNd => c == Curvature::Spherical && n >= 3,
            TheoremId::Gaussian => c != Curvature::Spherical,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Applicability(format!("{self} does not apply in {space}")))
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        TheoremId::ALL
            .into_iter()
            .find(|t| t.id() == key || t.aliases().contains(&key.as_str()))
            .ok_or_else(|| {
                let known: Vec<&str> = TheoremId::ALL.iter().map(|t| t.id()).collect();
                Error::Parse(format!("unknown theorem '{s}' (known: {})", known.join(", ")))
            })
    }
}

/// Argument scaling of the concave spherical bound.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConcaveArgument {
    /// `F(vol / (2^n |S^{n-1}|))`, the value the chain of identities produces.
    #[default]
    Scaled,
    /// `F(vol / |S^{n-1}|)`.
    Unscaled,
}

/// `arccos(1 - u)` without cancellation for small `u`.
fn arccos_one_minus(u: f64) -> f64 {
    2.0 * (u / 2.0).max(0.0).sqrt().min(1.0).asin()
}

/// `16 ∫_0^{π/2} arctan²(tan(v/4) / cos θ) dθ`.
pub fn lune_bound(vol: f64) -> Result<f64> {
    if !(vol >= 0.0) {
        return Err(Error::domain("vol", vol, "need vol >= 0"));
    }
    let w = vol / 4.0;
    if w >= FRAC_PI_2 {
        return Ok(2.0 * PI.powi(3));
    }
    let tw = w.tan();
    let i = integrate_adaptive(
        |th: f64| tw.atan2(th.cos()).powi(2),
        0.0,
        FRAC_PI_2,
        AdaptiveOptions::relative(1e-14),
    )?;
    Ok(16.0 * i.value)
}

/// The right side of `theorem` for a body of volume (or measure) `vol` in `space`.
pub fn rhs_from_volume(
    theorem: TheoremId,
    space: &SpaceSpec,
    vol: f64,
    mu: Option<&RadialDensityMeasure>,
    arg: ConcaveArgument,
) -> Result<f64> {
    theorem.check_space(space)?;
    let n = space.dim();
    Ok(match theorem {
        TheoremId::BusemannEuclidean => bound_constants(BoundKind::Busemann, n)? * vol.powi(n as i32 - 1),
        TheoremId::Hyperbolic => bound_constants(BoundKind::Hyperbolic, n)? * h_hyperbolic(n, vol)?,
        TheoremId::SphericalConcave => {
            let a = sphere_area::<f64>(n - 1);
            let scale = match arg {
                ConcaveArgument::Scaled => 2f64.powi(n as i32) * a,
                ConcaveArgument::Unscaled => a,
            };
            2f64.powi(n as i32 - 1) * a * sphere_area::<f64>(n - 2) * f_spherical(n, vol / scale)?
        }
        TheoremId::SphericalCrude => bound_constants(BoundKind::SphericalCrude, n)? * vol.powi(n as i32 - 1),
        TheoremId::Min2d => 8.0 * PI * arccos_one_minus(vol / (2.0 * PI)).powi(2),
        TheoremId::ConeMax => PI * PI * vol,
        TheoremId::LuneMax => lune_bound(vol)?,
        TheoremId::MinNd => bound_constants(BoundKind::SphericalMinimum, n)? * vol.powi(n as i32),
        TheoremId::Gaussian => {
            let default = RadialDensityMeasure::gaussian();
            let mu = mu.unwrap_or(&default);
            mu.psi_composite(space, vol)?.powi(n as i32 - 1)
        }
    })
}

/// The measure a theorem integrates against.
fn theorem_measure(theorem: TheoremId, mu: Option<&RadialDensityMeasure>) -> Option<RadialDensityMeasure> {
    match theorem {
        TheoremId::Gaussian => Some(mu.cloned().unwrap_or_else(RadialDensityMeasure::gaussian)),
        _ => None,
    }
}

/// The right side of `theorem` for `body`.
pub fn rhs_bound(theorem: TheoremId, body: &StarBody, mu: Option<&RadialDensityMeasure>) -> Result<f64> {
    theorem.check_space(body.space())?;
    let m = theorem_measure(theorem, mu);
    let vol = volume_with(body, m.as_ref(), &QuadratureConfig::default())?.value;
    rhs_from_volume(theorem, body.space(), vol, m.as_ref(), ConcaveArgument::Scaled)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportQuadrature {
    pub outer_degree: usize,
    pub inner_degree: usize,
    pub radial_tol: f64,
}

/// One numerical check of one inequality on one body.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub format_version: u32,
    pub theorem_id: TheoremId,
    pub sense: Sense,
    pub lhs: f64,
    pub lhs_error: f64,
    pub rhs: f64,
    pub volume: f64,
    /// Oriented so that `gap >= 0` means the inequality holds.
    pub gap: f64,
    pub rel_gap: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub quadrature: ReportQuadrature,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl InequalityReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// `|lhs - rhs| / |rhs|`.
    pub fn rel_deviation(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.rhs.abs().max(f64::MIN_POSITIVE)
    }

    fn new(
        theorem: TheoremId,
        lhs: f64,
        lhs_error: f64,
        rhs: f64,
        volume: f64,
        tolerance: f64,
        quadrature: ReportQuadrature,
    ) -> Self {
        let gap = match theorem.sense() {
            Sense::Upper => rhs - lhs,
            Sense::Lower => lhs - rhs,
        };
        Self {
            format_version: REPORT_FORMAT_VERSION,
            theorem_id: theorem,
            sense: theorem.sense(),
            lhs,
            lhs_error,
            rhs,
            volume,
            gap,
            rel_gap: gap / rhs.abs().max(f64::MIN_POSITIVE),
            tolerance,
            verdict: if gap >= -tolerance {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            quadrature,
            body: None,
            note: None,
        }
    }
}

/// Settings of [`check_theorem`].
#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub measure: Option<RadialDensityMeasure>,
    pub quadrature: QuadratureConfig,
    /// Relative slack added to ten times the quadrature error estimate.
    pub rel_tol: f64,
    pub concave_argument: ConcaveArgument,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            measure: None,
            quadrature: QuadratureConfig::default(),
            rel_tol: 1e-9,
            concave_argument: ConcaveArgument::Scaled,
        }
    }
}

/// Evaluates both sides of `theorem` on `body`.
pub fn check_theorem(theorem: TheoremId, body: &StarBody, opts: &CheckOptions) -> Result<InequalityReport> {
    let space = body.space();
    theorem.check_space(space)?;
    if theorem.requires_symmetry() && !body.is_symmetric() {
        return Err(Error::Applicability(format!(
            "{theorem} is stated for origin-symmetric bodies; construct the body with a symmetric claim"
        )));
    }
    let n = body.dim();
    let mu = theorem_measure(theorem, opts.measure.as_ref());
    let vol = volume_with(body, mu.as_ref(), &opts.quadrature)?;
    let rhs = rhs_from_volume(theorem, space, vol.value, mu.as_ref(), opts.concave_argument)?;
    let fopts = FunctionalOptions {
        measure: mu,
        normalized: theorem == TheoremId::Gaussian,
        exponent: Some(theorem.exponent(n)),
        quadrature: opts.quadrature,
    };
    let lhs = intersection_functional(body, &fopts)?;
    // the right side inherits the volume error through its derivative
    let rhs_err = match theorem {
        TheoremId::ConeMax => PI * PI * vol.error,
        _ => (n as f64) * rhs.abs() * vol.error / vol.value.abs().max(f64::MIN_POSITIVE),
    };
    let tolerance = 10.0 * (lhs.error + rhs_err) + opts.rel_tol * rhs.abs();
    let q = ReportQuadrature {
        outer_degree: opts.quadrature.outer(n),
        inner_degree: opts.quadrature.inner(n),
        radial_tol: opts.quadrature.radial_tol,
    };
    let mut report = InequalityReport::new(theorem, lhs.value, lhs.error, rhs, vol.value, tolerance, q);
    report.body = Some(body.profile().kind().to_string());
    if theorem == TheoremId::SphericalCrude {
        report.note = Some(format!("strictness margin {:.6e}", report.gap));
    }
    if theorem == TheoremId::SphericalConcave {
        let (this, other, other_arg) = match opts.concave_argument {
            ConcaveArgument::Scaled => ("vol/(2^n|S^{n-1}|)", "vol/|S^{n-1}|", ConcaveArgument::Unscaled),
            ConcaveArgument::Unscaled => ("vol/|S^{n-1}|", "vol/(2^n|S^{n-1}|)", ConcaveArgument::Scaled),
        };
        let alt = match rhs_from_volume(theorem, space, vol.value, None, other_arg) {
            Ok(r) => {
                let verdict = if r - lhs.value >= -tolerance { "holds" } else { "fails" };
                format!("argument {other}: rhs {r:.6e}, gap {:.6e} ({verdict})", r - lhs.value)
            }
            Err(_) => format!("argument {other}: outside the domain of F"),
        };
        report.note = Some(format!("argument {this}: gap {:.6e}; {alt}", report.gap));
    }
    Ok(report)
}
