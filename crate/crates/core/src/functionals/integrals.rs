use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rayon::prelude::*;

use serde::{Deserialize, Serialize};

use super::measure::RadialDensityMeasure;
use crate::bodies::{RadialProfile, StarBody};
use crate::error::{Error, Result};
use crate::quadrature::{
    default_degree, integrate_adaptive, integrate_pieces, sphere_area, AdaptiveOptions, Integral, SphereRule,
    SubsphereRule,
};
use crate::spaces::Direction;

/// Quadrature settings for volume, section and functional evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Exactness of the rule on `S^{n-1}`; `None` selects the default.
    pub outer_degree: Option<usize>,
    /// Exactness of the rule on `S^{n-2}`; `None` selects the default.
    pub inner_degree: Option<usize>,
    /// Relative tolerance of adaptive one-dimensional integrals.
    pub radial_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            outer_degree: None,
            inner_degree: None,
            radial_tol: 1e-12,
        }
    }
}

impl QuadratureConfig {
    pub fn with_degrees(outer: usize, inner: usize) -> Self {
        Self {
            outer_degree: Some(outer),
            inner_degree: Some(inner),
            ..Self::default()
        }
    }

    pub fn outer(&self, n: usize) -> usize {
        self.outer_degree.unwrap_or_else(|| default_degree(n - 1))
    }

    pub fn inner(&self, n: usize) -> usize {
        self.inner_degree.unwrap_or_else(|| default_degree(n.saturating_sub(2)))
    }

    fn coarse(&self, n: usize) -> Self {
        Self {
            outer_degree: Some((2 * self.outer(n) / 3).max(1)),
            inner_degree: Some((2 * self.inner(n) / 3).max(1)),
            radial_tol: self.radial_tol,
        }
    }

    fn adaptive(&self) -> AdaptiveOptions<f64> {
        AdaptiveOptions {
            abs_tol: 1e-300,
            rel_tol: self.radial_tol,
            max_subdivisions: 20_000,
        }
    }
}

/// Options of the intersection functional `∫ μ(K ∩ ξ^⊥)^p dξ`.
#[derive(Clone, Debug, Default)]
pub struct FunctionalOptions {
    pub measure: Option<RadialDensityMeasure>,
    /// Divide by `|S^{n-1}|`.
    pub normalized: bool,
    /// Exponent `p`; `None` means the ambient dimension.
    pub exponent: Option<f64>,
    pub quadrature: QuadratureConfig,
}

impl FunctionalOptions {
    pub fn with_measure(mut self, mu: RadialDensityMeasure) -> Self {
        self.measure = Some(mu);
        self
    }

    pub fn normalized(mut self) -> Self {
        self.normalized = true;
        self
    }

    pub fn exponent(mut self, p: f64) -> Self {
        self.exponent = Some(p);
        self
    }

    pub fn quadrature(mut self, q: QuadratureConfig) -> Self {
        self.quadrature = q;
        self
    }
}

struct Kernel<'a> {
    body: &'a StarBody,
    measure: Option<&'a RadialDensityMeasure>,
}

impl Kernel<'_> {
    /// `∫_0^x f_m s^{m-1}`.
    fn primitive(&self, m: usize, x: f64) -> f64 {
        let space = self.body.space();
        let v = match self.measure {
            None => crate::spaces::phi(space, m, x),
            Some(mu) => mu.radial_primitive(space, m, x),
        };
        v.unwrap_or(f64::NAN)
    }
}

fn checked(i: Integral<f64>, what: &str) -> Result<Integral<f64>> {
    if i.value.is_finite() {
        Ok(i)
    } else {
        Err(Error::Solver(format!("{what} evaluated to a non-finite value")))
    }
}

fn exact(value: f64) -> Integral<f64> {
    Integral { value, error: 0.0 }
}

/// Breakpoints in `[0, 2π)` for `ψ ↦ h(ρ(ψ), ρ(ψ + π))`.
fn paired_kinks(profile: &RadialProfile) -> Vec<f64> {
    let k = profile.kinks();
    let mut out: Vec<f64> = k.iter().flat_map(|&a| [a, (a - PI).rem_euclid(TAU)]).collect();
    out.sort_by(f64::total_cmp);
    out
}

/// `∫_0^π g(β) sin^{n-2} β dβ` with optional breakpoints.
fn polar_integral<F: FnMut(f64) -> f64>(
    n: usize,
    mut g: F,
    breaks: &[f64],
    opts: AdaptiveOptions<f64>,
) -> Result<Integral<f64>> {
    let p = n as i32 - 2;
    integrate_pieces(|b: f64| g(b) * b.sin().powi(p), 0.0, PI, breaks, opts)
}

/// `∫_0^π g(σ(sin β)) sin^{n-2} β dβ` for the section measure `σ` of a zonal
/// cone base. The integrand is symmetric about `π/2` and has a root-type
/// kink wherever `sin β` meets a band edge, so `[0, π/2]` is split at the
/// edges and each piece is integrated after the substitution
/// `β = β_0 + h (3u² - 2u³)`, which is flat at both ends.
fn zonal_cone_polar<G: Fn(f64) -> f64 + Sync>(
    n: usize,
    bands: &[[f64; 2]],
    g: G,
    rel_tol: f64,
) -> Result<Integral<f64>> {
    let mut edges: Vec<f64> = bands
        .iter()
        .flat_map(|b| [b[0], b[1]])
        .filter(|t| t.abs() < 1.0)
        .map(|t| t.abs().asin())
        .chain([0.0, FRAC_PI_2])
        .collect();
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|x, y| (*x - *y).abs() <= 1e-15);
    let p = n as i32 - 2;
    let opts = AdaptiveOptions {
        abs_tol: f64::MIN_POSITIVE,
        rel_tol,
        max_subdivisions: 4000,
    };
    let parts: Vec<Result<Integral<f64>>> = edges
        .par_windows(2)
        .map(|w| {
            let (lo, h) = (w[0], w[1] - w[0]);
            integrate_adaptive(
                |u: f64| {
                    let b = lo + h * u * u * (3.0 - 2.0 * u);
                    let jac = 6.0 * h * u * (1.0 - u);
                    g(crate::bodies::zonal_section_measure(n, bands, b.sin())) * b.sin().powi(p) * jac
                },
                0.0,
                1.0,
                opts,
            )
        })
        .collect();
    let mut total = Integral { value: 0.0, error: 0.0 };
    for part in parts {
        let part = part?;
        total.value += 2.0 * part.value;
        total.error += 2.0 * part.error;
    }
    Ok(total)
}

/// `vol(K)` (or `μ(K)`).
pub fn volume(body: &StarBody, mu: Option<&RadialDensityMeasure>) -> Result<Integral<f64>> {
    volume_with(body, mu, &QuadratureConfig::default())
}

pub fn volume_with(
    body: &StarBody,
    mu: Option<&RadialDensityMeasure>,
    cfg: &QuadratureConfig,
) -> Result<Integral<f64>> {
    let k = Kernel { body, measure: mu };
    let n = body.dim();
    let profile = body.profile();
    if let RadialProfile::Cone { base, radius } = profile {
        return checked(exact(k.primitive(n, *radius) * base.measure(n)), "volume");
    }
    if n == 2 {
        let i = integrate_pieces(
            |psi| k.primitive(2, profile.radial_angle(psi)),
            0.0,
            TAU,
            &profile.kinks(),
            cfg.adaptive(),
        )?;
        return checked(i, "volume");
    }
    if let Some((_, rho)) = profile.zonal(n) {
        let i = polar_integral(n, |b| k.primitive(n, rho(b.cos())), &[], cfg.adaptive())?;
        let s = sphere_area::<f64>(n - 2);
        return checked(
            Integral {
                value: s * i.value,
                error: s * i.error,
            },
            "volume",
        );
    }
    let i = refine(n, cfg, |c| {
        let rule = SphereRule::<f64>::new(n - 1, c.outer(n))?;
        Ok(rule.integrate(|u| k.primitive(n, body.radial(u))))
    })?;
    checked(i, "volume")
}

/// Rule evaluation compared against a coarser rule. With default degrees,
/// both degrees grow until the two agree to `AUTO_REL_TOL` or reach the cap.
fn refine<F: Fn(&QuadratureConfig) -> Result<f64>>(n: usize, cfg: &QuadratureConfig, eval: F) -> Result<Integral<f64>> {
    let auto = cfg.outer_degree.is_none() && cfg.inner_degree.is_none();
    let cap = if n <= 3 { 191 } else { 47 };
    let mut c = *cfg;
    let mut coarse = eval(&c.coarse(n))?;
    loop {
        let fine = eval(&c)?;
        let error = (fine - coarse).abs();
        let next = 2 * c.outer(n) + 1;
        if !auto || error <= AUTO_REL_TOL * fine.abs() || next > cap {
            return Ok(Integral { value: fine, error });
        }
        coarse = fine;
        c.outer_degree = Some(next);
        c.inner_degree = Some(2 * c.inner(n) + 1);
    }
}

const AUTO_REL_TOL: f64 = 1e-11;

/// `vol(K ∩ ξ^⊥)` (or `μ(K ∩ ξ^⊥)`).
pub fn section_volume(body: &StarBody, xi: &Direction, mu: Option<&RadialDensityMeasure>) -> Result<f64> {
    section_volume_with(body, xi, mu, &QuadratureConfig::default())
}

pub fn section_volume_with(
    body: &StarBody,
    xi: &Direction,
    mu: Option<&RadialDensityMeasure>,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let n = body.dim();
    if xi.dim() != n {
        return Err(Error::domain(
            "xi dimension",
            xi.dim() as f64,
            "must equal the body dimension",
        ));
    }
    let k = Kernel { body, measure: mu };
    let profile = body.profile();
    if let RadialProfile::Cone { base, radius } = profile {
        return Ok(k.primitive(n - 1, *radius) * base.section_measure(xi));
    }
    if n == 2 {
        let p = [-xi[1], xi[0]];
        let m = [xi[1], -xi[0]];
        return Ok(k.primitive(1, body.radial(&p)) + k.primitive(1, body.radial(&m)));
    }
    if let Some((axis, rho)) = profile.zonal(n) {
        let c = axis.dot(xi).clamp(-1.0, 1.0);
        return Ok(zonal_section(&k, n, &*rho, (1.0 - c * c).sqrt(), cfg)?.value);
    }
    let inner = SphereRule::<f64>::new(n - 2, cfg.inner(n))?;
    let sub = SubsphereRule::new(&inner, xi)?;
    Ok(sub.integrate(|u| k.primitive(n - 1, body.radial(u))))
}

/// Section of a zonal body at `sin β = s`: `|S^{n-3}| ∫_0^π P(ρ̂(s cos γ)) sin^{n-3} γ dγ`.
fn zonal_section(
    k: &Kernel<'_>,
    n: usize,
    rho: &dyn Fn(f64) -> f64,
    s: f64,
    cfg: &QuadratureConfig,
) -> Result<Integral<f64>> {
    let p = n as i32 - 3;
    let opts = AdaptiveOptions {
        rel_tol: cfg.radial_tol * 0.1,
        ..cfg.adaptive()
    };
    let i = integrate_adaptive(
        |g: f64| k.primitive(n - 1, rho(s * g.cos())) * g.sin().powi(p),
        0.0,
        PI,
        opts,
    )?;
    let a = sphere_area::<f64>(n - 3);
    Ok(Integral {
        value: a * i.value,
        error: a * i.error,
    })
}

/// `∫_{S^{n-1}} μ(K ∩ ξ^⊥)^n dξ` with the default options.
pub fn busemann_functional(
    body: &StarBody,
    mu: Option<&RadialDensityMeasure>,
    normalized: bool,
) -> Result<Integral<f64>> {
    let opts = FunctionalOptions {
        measure: mu.cloned(),
        normalized,
        ..FunctionalOptions::default()
    };
    intersection_functional(body, &opts)
}

/// `∫_{S^{n-1}} μ(K ∩ ξ^⊥)^p dξ` with an error estimate.
///
/// Planar bodies and bodies of revolution reduce to adaptive
/// one-dimensional integrals; cones use exact section measures; other
/// bodies use a product rule on `S^{n-1}` with great-subsphere rules, and
/// the error is estimated against a coarser pair of rules.
pub fn intersection_functional(body: &StarBody, opts: &FunctionalOptions) -> Result<Integral<f64>> {
    let n = body.dim();
    let p = opts.exponent.unwrap_or(n as f64);
    let cfg = &opts.quadrature;
    let k = Kernel {
        body,
        measure: opts.measure.as_ref(),
    };
    let profile = body.profile();
    let pow = |x: f64| if p == n as f64 { x.powi(n as i32) } else { x.powf(p) };
    let raw = if n == 2 {
        integrate_pieces(
            |psi| pow(k.primitive(1, profile.radial_angle(psi)) + k.primitive(1, profile.radial_angle(psi + PI))),
            0.0,
            TAU,
            &paired_kinks(profile),
            cfg.adaptive(),
        )?
    } else if let RadialProfile::Cone {
        base: crate::bodies::ConeBase::Zonal { bands, .. },
        radius,
    } = profile
    {
        let scale = k.primitive(n - 1, *radius);
        let tol = cfg.radial_tol.max(1e-10);
        let i = zonal_cone_polar(n, bands, |x| pow(scale * x), tol)?;
        let s = sphere_area::<f64>(n - 2);
        Integral {
            value: s * i.value,
            error: s * i.error,
        }
    } else if let Some((_, rho)) = profile.zonal(n) {
        let mut inner_err = 0.0f64;
        let i = polar_integral(
            n,
            |b| match zonal_section(&k, n, &*rho, b.sin(), cfg) {
                Ok(sec) => {
                    inner_err = inner_err.max(sec.error / sec.value.abs().max(1e-300));
                    pow(sec.value)
                }
                Err(_) => f64::NAN,
            },
            &[],
            cfg.adaptive(),
        )?;
        let s = sphere_area::<f64>(n - 2);
        Integral {
            value: s * i.value,
            error: s * (i.error + p * inner_err * i.value.abs()),
        }
    } else {
        refine(n, cfg, |c| rule_functional(&k, n, &pow, c))?
    };
    let raw = checked(raw, "functional")?;
    if opts.normalized {
        let a = sphere_area::<f64>(n - 1);
        Ok(Integral {
            value: raw.value / a,
            error: raw.error / a,
        })
    } else {
        Ok(raw)
    }
}

fn rule_functional<P: Fn(f64) -> f64 + Sync>(k: &Kernel<'_>, n: usize, pow: P, cfg: &QuadratureConfig) -> Result<f64> {
    let outer = SphereRule::<f64>::new(n - 1, cfg.outer(n))?;
    let inner = SphereRule::<f64>::new(n - 2, cfg.inner(n))?;
    let v = outer.integrate(|xi| match SubsphereRule::new(&inner, xi) {
        Ok(sub) => pow(sub.integrate(|u| k.primitive(n - 1, k.body.radial(u)))),
        Err(_) => f64::NAN,
    });
    Ok(v)
}
