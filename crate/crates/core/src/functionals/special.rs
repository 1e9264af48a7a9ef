//! One-variable functions behind the hyperbolic and spherical bounds.

use crate::error::{Error, Result};
use crate::quadrature::sphere_area;
use crate::solve::invert_increasing;
use crate::spaces::{phi, phi_inverse, phi_unchecked, sphere_phi_full, Curvature, SpaceSpec};

fn hyperbolic(n: usize) -> SpaceSpec {
    SpaceSpec {
        curvature: Curvature::Hyperbolic,
        dim: n.max(2),
    }
}

fn pow2(k: usize) -> f64 {
    2f64.powi(k as i32)
}

/// `F_n(t) = ∫_0^t r^{n-1}/(1-r²)^n dr` on `[0, 1)`.
///
/// Evaluated as `2^{-n} φ_n(2 artanh t)` in the hyperbolic metric.
pub fn fn_hyperbolic(n: usize, t: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("n", 0.0, "need n >= 1"));
    }
    if !(0.0..1.0).contains(&t) {
        return Err(Error::domain("t", t, "F_n is defined on [0, 1)"));
    }
    Ok(phi_unchecked(Curvature::Hyperbolic, n, 2.0 * t.atanh())? / pow2(n))
}

/// Inverse of [`fn_hyperbolic`].
pub fn fn_hyperbolic_inverse(n: usize, v: f64) -> Result<f64> {
    if !(v >= 0.0) || v.is_infinite() {
        return Err(Error::domain("v", v, "need a finite v >= 0"));
    }
    let x = phi_inverse(&hyperbolic(n), n, v * pow2(n))?;
    Ok((x / 2.0).tanh())
}

/// `G(t) = F_{n-1}(F_n^{-1}(t))^{n/(n-1)}`.
pub fn g_hyperbolic(n: usize, t: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("n", n as f64, "need n >= 2"));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let s = fn_hyperbolic_inverse(n, t)?;
    Ok(fn_hyperbolic(n - 1, s)?.powf(n as f64 / (n as f64 - 1.0)))
}

/// `H(t) = G(t / (2^n |S^{n-1}|))^{n-1}`.
pub fn h_hyperbolic(n: usize, t: f64) -> Result<f64> {
    let g = g_hyperbolic(n, t / (pow2(n) * sphere_area::<f64>(n - 1)))?;
    Ok(g.powi(n as i32 - 1))
}

/// `∫_0^t r^{m-1}/(1+r²)^m dr`, i.e. `2^{-m} φ_m(2 arctan t)` on the sphere.
pub fn spherical_inner(m: usize, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::domain("t", t, "need t >= 0"));
    }
    let x = if t.is_infinite() {
        std::f64::consts::PI
    } else {
        2.0 * t.atan()
    };
    Ok(sphere_phi_full(m, x)? / pow2(m))
}

/// Supremum of the argument of [`f_spherical`].
pub fn f_spherical_limit(n: usize) -> f64 {
    spherical_inner(n, f64::INFINITY).unwrap_or(f64::NAN)
}

/// End of the interval on which [`f_spherical`] is concave: the image of `t = 1`.
pub fn f_spherical_concave_limit(n: usize) -> f64 {
    spherical_inner(n, 1.0).unwrap_or(f64::NAN)
}

/// The function `F` with `F(∫_0^t r^{n-1}/(1+r²)^n) = ∫_0^t r^{n-2}/(1+r²)^{n-1}`.
pub fn f_spherical(n: usize, v: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("n", n as f64, "need n >= 2"));
    }
    let limit = f_spherical_limit(n);
    if !(v >= 0.0) || v >= limit {
        return Err(Error::domain("v", v, format!("F is defined on [0, {limit})")));
    }
    if v == 0.0 {
        return Ok(0.0);
    }
    let x = invert_increasing(
        |x| sphere_phi_full(n, x).unwrap_or(f64::NAN),
        v * pow2(n),
        0.0,
        std::f64::consts::PI,
        1e-15,
    )?;
    Ok(sphere_phi_full(n - 1, x)? / pow2(n - 1))
}

/// Both sides of `(φ_{n-1}(π/2)/φ_n(π/2)) φ_n(x) ≤ φ_{n-1}(x)` on `[0, π/2]`.
pub fn phi_ratio_inequality_check(n: usize, x: f64) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::domain("n", n as f64, "need n >= 2"));
    }
    let s = SpaceSpec {
        curvature: Curvature::Spherical,
        dim: n,
    };
    let h = std::f64::consts::FRAC_PI_2;
    let ratio = phi(&s, n - 1, h)? / phi(&s, n, h)?;
    Ok((ratio * phi(&s, n, x)?, phi(&s, n - 1, x)?))
}

/// `x² - r² ≥ (2r / sin r)(cos r - cos x)` on `(0, π/2]²`; returns both sides.
pub fn min_inequality_check(x: f64, r: f64) -> Result<(f64, f64)> {
    let h = std::f64::consts::FRAC_PI_2;
    for (name, v) in [("x", x), ("r", r)] {
        if !(v > 0.0 && v <= h) {
            return Err(Error::domain(name, v, "need a value in (0, pi/2]"));
        }
    }
    // cos r - cos x = 2 sin((x+r)/2) sin((x-r)/2)
    let diff = 2.0 * ((x + r) / 2.0).sin() * ((x - r) / 2.0).sin();
    Ok(((x - r) * (x + r), 2.0 * r / r.sin() * diff))
}
