use std::f64::consts::FRAC_PI_2;

use super::cone::{striped_cap_subset, striped_cap_with_strips, ConeBase, StripedCap};
use super::profile::{HarmonicParams, HarmonicProfile, RadialProfile};
use super::StarBody;
use crate::error::{Error, Result};
use crate::functionals::{intersection_functional, volume, FunctionalOptions};
use crate::quadrature::sphere_area;
use crate::solve::brent;
use crate::spaces::{phi, Curvature, Direction, SpaceSpec};

/// The centered ball of radius `r`.
pub fn make_ball(space: SpaceSpec, r: f64) -> Result<StarBody> {
    space.check_radius(r)?;
    StarBody::new(space, RadialProfile::Ball { r }, true)
}

/// The centered Euclidean ellipsoid with the given semiaxes.
pub fn make_ellipsoid(semiaxes: Vec<f64>) -> Result<StarBody> {
    let space = SpaceSpec::euclidean(semiaxes.len())?;
    StarBody::new(space, RadialProfile::Ellipsoid { semiaxes }, true)
}

/// The spherical cone over `base` in the hemisphere `S^n_+`.
pub fn make_cone(n: usize, base: ConeBase) -> Result<StarBody> {
    let space = SpaceSpec::hemisphere(n)?;
    let symmetric = base.is_symmetric();
    StarBody::new(
        space,
        RadialProfile::Cone {
            base,
            radius: FRAC_PI_2,
        },
        symmetric,
    )
}

/// The lune of half-width `w` about `axis` in `S^2_+`.
pub fn make_lune(w: f64, axis: Direction) -> Result<StarBody> {
    let space = SpaceSpec::hemisphere(2)?;
    StarBody::new(space, RadialProfile::Lune { w, axis }, true)
}

/// A ball with a zonal harmonic perturbation, volume-matched to the ball.
#[derive(Clone, Debug)]
pub struct PerturbedBall {
    pub body: StarBody,
    pub r: f64,
    pub alpha: f64,
    pub beta: f64,
    pub degree: usize,
    /// `‖α + βH_k‖_{L²(S^{n-1})}`.
    pub delta_norm: f64,
    /// `‖α + βH_k‖_{L^∞(S^{n-1})}`.
    pub eps_norm: f64,
}

/// `ρ = r + α + β H_k(⟨u, axis⟩)` in `S^n_+`, `n = axis.dim()`, with `α`
/// solved so that the volume equals that of the ball of radius `r`.
pub fn make_perturbed_ball(r: f64, beta: f64, degree: usize, axis: Direction) -> Result<PerturbedBall> {
    let n = axis.dim();
    let space = SpaceSpec::hemisphere(n)?;
    if !(r > 0.0 && r < FRAC_PI_2) {
        return Err(Error::domain("r", r, "need 0 < r < pi/2"));
    }
    if degree < 2 || degree % 2 == 1 {
        return Err(Error::domain("degree", degree as f64, "need an even degree >= 2"));
    }
    let build = |alpha: f64| -> Result<StarBody> {
        let h = HarmonicProfile::new(HarmonicParams {
            r,
            alpha,
            beta,
            degree,
            axis: axis.clone(),
        })?;
        StarBody::new(space, RadialProfile::Harmonic(h), true)
    };
    let target = sphere_area::<f64>(n - 1) * phi(&space, n, r)?;
    let probe = build(0.0)?;
    let peak = match probe.profile() {
        RadialProfile::Harmonic(h) => h.harmonic().profile(1.0).abs().max(h.harmonic().profile(-1.0).abs()),
        _ => unreachable!(),
    };
    let alpha = if beta == 0.0 {
        0.0
    } else {
        let span = beta.abs() * peak;
        if r - 2.0 * span <= 0.0 || r + 2.0 * span >= FRAC_PI_2 {
            return Err(Error::domain(
                "beta",
                beta,
                "perturbed radial function leaves (0, pi/2)",
            ));
        }
        let mut failure = None;
        let a = brent(
            |a| match build(a).and_then(|b| volume(&b, None)) {
                Ok(v) => v.value - target,
                Err(e) => {
                    failure = Some(e);
                    f64::NAN
                }
            },
            -span,
            span,
            1e-15,
            200,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        a?
    };
    let body = build(alpha)?;
    let (delta_norm, eps_norm) = match body.profile() {
        RadialProfile::Harmonic(h) => {
            let l2 = (sphere_area::<f64>(n - 1) * alpha * alpha + beta * beta).sqrt();
            let sup = (0..=4000)
                .map(|i| h.perturbation(-1.0 + 2.0 * i as f64 / 4000.0).abs())
                .fold(0.0, f64::max);
            (l2, sup)
        }
        _ => unreachable!(),
    };
    Ok(PerturbedBall {
        body,
        r,
        alpha,
        beta,
        degree,
        delta_norm,
        eps_norm,
    })
}

/// An origin-symmetric cone over a striped cap and its reflection.
#[derive(Clone, Debug)]
pub struct StripedCone {
    pub body: StarBody,
    pub cap: StripedCap,
    pub lambda: f64,
}

/// The cone in `S^n_+` over `A ∪ (-A)`, `A` a striped subset of the cap
/// `{x_n ≥ α}`, with volume `t` times the volume of the hemisphere.
pub fn make_striped_cone(n: usize, t: f64, alpha: f64, eps: f64) -> Result<StripedCone> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::domain("t", t, "need 0 < t < 1"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain("alpha", alpha, "need 0 < alpha < 1"));
    }
    let axis = Direction::axis(n, n - 1);
    let cap = ConeBase::cap(axis.clone(), alpha)?.measure(n);
    let wanted = t * sphere_area::<f64>(n - 1) / 2.0;
    if wanted > cap * (1.0 + 1e-14) {
        return Err(Error::Precondition(format!(
            "cap {{x_n >= {alpha}}} has measure {cap}, below t|S^{{n-1}}|/2 = {wanted}"
        )));
    }
    let lambda = (wanted / cap).min(1.0);
    let striped = striped_cap_subset(alpha, &axis, lambda, eps)?;
    let base = striped.base.with_reflection()?;
    let body = make_cone(n, base)?;
    Ok(StripedCone {
        body,
        cap: striped,
        lambda,
    })
}

/// A star body of prescribed volume with small intersection functional.
#[derive(Clone, Debug)]
pub struct VanishingBody {
    pub body: StarBody,
    pub radius: f64,
    pub lambda: f64,
    pub strips: usize,
    /// The functional of `body`, evaluated directly.
    pub functional: f64,
}

/// Searches for an origin-symmetric body of volume `vol` in `R^n` or `H^n`
/// (`n ≥ 3`) whose functional is at most `eta`.
///
/// The body is the set `ρ = r` on `A ∪ (-A)` and `0` elsewhere, where `A`
/// is a striped subset of the cap `{x_n ≥ 1/2}` with `2 φ_n(r) |A| = vol`;
/// for each radius of a geometric schedule the strip count doubles from 8
/// while the functional keeps dropping by at least 20%, then `r` grows.
pub fn make_vanishing_body(space: SpaceSpec, vol: f64, eta: f64) -> Result<VanishingBody> {
    let n = space.dim();
    if space.curvature() == Curvature::Spherical {
        return Err(Error::Applicability("vanishing bodies live in R^n or H^n".into()));
    }
    if n < 3 {
        return Err(Error::Unsupported("vanishing bodies need n >= 3".into()));
    }
    if !(vol > 0.0 && vol.is_finite()) {
        return Err(Error::domain("vol", vol, "need a positive finite volume"));
    }
    if !(eta > 0.0) {
        return Err(Error::domain("eta", eta, "need eta > 0"));
    }
    let alpha = 0.5;
    let axis = Direction::axis(n, n - 1);
    let cap = ConeBase::cap(axis.clone(), alpha)?.measure(n);
    let cap_limit = match space.curvature() {
        Curvature::Hyperbolic => 600.0 / (n as f64 - 1.0),
        _ => 1e6,
    };
    let mut r: f64 = 1.0;
    while 2.0 * phi(&space, n, r)? * cap < vol {
        r *= 1.25;
    }
    loop {
        if r > cap_limit {
            return Err(Error::Resource(format!("radius {r} exceeds the safe range of {space}")));
        }
        let lambda = vol / (2.0 * phi(&space, n, r)? * cap);
        let mut strips = 8;
        let mut previous = f64::INFINITY;
        while strips <= MAX_VANISHING_STRIPS {
            let striped = striped_cap_with_strips(alpha, &axis, lambda, strips)?;
            let base = striped.base.with_reflection()?;
            let body = StarBody::new(space, RadialProfile::Cone { base, radius: r }, true)?;
            let f = intersection_functional(&body, &FunctionalOptions::default())?.value;
            if f <= eta {
                return Ok(VanishingBody {
                    body,
                    radius: r,
                    lambda,
                    strips,
                    functional: f,
                });
            }
            if f > 0.8 * previous {
                break;
            }
            previous = f;
            strips *= 2;
        }
        r *= 1.25;
    }
}

const MAX_VANISHING_STRIPS: usize = 4096;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::section_volume;
    use std::f64::consts::PI;

    #[test]
    fn ball_volumes() {
        let s = SpaceSpec::hemisphere(2).unwrap();
        let hemi = make_ball(s, FRAC_PI_2).unwrap();
        assert!((volume(&hemi, None).unwrap().value - 2.0 * PI).abs() < 1e-12);
        let h = SpaceSpec::hyperbolic(3).unwrap();
        let b = make_ball(h, 1.0).unwrap();
        let want = 4.0 * PI * phi(&h, 3, 1.0).unwrap();
        assert!((volume(&b, None).unwrap().value - want).abs() < 1e-12 * want);
        assert!(make_ball(s, 1.6).is_err());
    }

    #[test]
    fn ellipse_area() {
        let e = make_ellipsoid(vec![2.0, 1.0]).unwrap();
        assert!((volume(&e, None).unwrap().value - 2.0 * PI).abs() < 1e-9);
        assert!((e.radial(&[1.0, 0.0]) - 2.0).abs() < 1e-15);
        assert!(make_ellipsoid(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn lune_volume_is_four_w() {
        let l = make_lune(0.3, Direction::axis(2, 0)).unwrap();
        assert!((volume(&l, None).unwrap().value - 1.2).abs() < 1e-6);
    }

    #[test]
    fn cone_volume_equals_base_measure() {
        let base = ConeBase::arcs(vec![[0.2, 1.1], [3.0, 3.5]]).unwrap();
        let c = make_cone(2, base.clone()).unwrap();
        assert!((volume(&c, None).unwrap().value - base.measure(2)).abs() < 1e-14);
    }

    #[test]
    fn perturbed_ball_alpha() {
        let axis = Direction::axis(3, 2);
        let r = FRAC_PI_2 / 2.0;
        let p0 = make_perturbed_ball(r, 0.0, 2, axis.clone()).unwrap();
        assert_eq!(p0.alpha, 0.0);
        let p = make_perturbed_ball(r, 0.05, 2, axis).unwrap();
        assert!(p.alpha < 0.0);
        let c0 = 2.0 / (2.0 * r.tan());
        let first_order = -c0 * p.delta_norm.powi(2) / (4.0 * PI);
        assert!(
            (p.alpha - first_order).abs() <= 0.1 * first_order.abs(),
            "{} vs {first_order}",
            p.alpha
        );
        let vb = 4.0 * PI * phi(&SpaceSpec::hemisphere(3).unwrap(), 3, r).unwrap();
        let got = volume(&p.body, None).unwrap();
        assert!((got.value - vb).abs() <= 1e-10 * vb, "{got:?} vs {vb}");
        assert!(p.body.is_symmetric());
    }

    #[test]
    fn striped_cone_volume() {
        let c = make_striped_cone(3, 0.3, 0.4, 0.05).unwrap();
        let hemi = PI * PI;
        let v = volume(&c.body, None).unwrap().value;
        assert!(
            (v - 0.3 * hemi).abs() < 1e-8,
            "{v} vs {} ({:?})",
            0.3 * hemi,
            c.cap.strips
        );
        assert!(c.body.is_symmetric());
        let xi = Direction::normalized(vec![0.3, 0.1, 0.9]).unwrap();
        assert!(section_volume(&c.body, &xi, None).unwrap() >= 0.0);
        assert!(make_striped_cone(3, 0.9, 0.5, 0.05).is_err());
    }
}
