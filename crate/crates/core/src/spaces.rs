//! The constant-curvature model spaces and their radial metric functions.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_adaptive, AdaptiveOptions};
use crate::scalar::Real;
use crate::solve::invert_increasing;

/// Sign of the sectional curvature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Curvature {
    Hyperbolic,
    Flat,
    Spherical,
}

impl Curvature {
    pub fn delta(self) -> i8 {
        match self {
            Curvature::Hyperbolic => -1,
            Curvature::Flat => 0,
            Curvature::Spherical => 1,
        }
    }
}

/// A model space: hyperbolic space, Euclidean space or the closed upper
/// hemisphere, of dimension `dim`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpace", into = "RawSpace")]
pub struct SpaceSpec {
    pub(crate) curvature: Curvature,
    pub(crate) dim: usize,
}

#[derive(Serialize, Deserialize)]
struct RawSpace {
    delta: i8,
    dim: usize,
}

impl TryFrom<RawSpace> for SpaceSpec {
    type Error = Error;

    fn try_from(raw: RawSpace) -> Result<Self> {
        SpaceSpec::new(raw.delta, raw.dim)
    }
}

impl From<SpaceSpec> for RawSpace {
    fn from(s: SpaceSpec) -> Self {
        RawSpace {
            delta: s.delta(),
            dim: s.dim,
        }
    }
}

impl SpaceSpec {
    pub fn new(delta: i8, dim: usize) -> Result<Self> {
        let curvature = match delta {
            -1 => Curvature::Hyperbolic,
            0 => Curvature::Flat,
            1 => Curvature::Spherical,
            _ => {
                return Err(Error::InvalidSpace(format!(
                    "curvature sign {delta} not in {{-1, 0, 1}}"
                )))
            }
        };
        if dim < 2 {
            return Err(Error::InvalidSpace(format!("dimension {dim} < 2")));
        }
        Ok(Self { curvature, dim })
    }

    pub fn hyperbolic(dim: usize) -> Result<Self> {
        Self::new(-1, dim)
    }

    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::new(0, dim)
    }

    pub fn hemisphere(dim: usize) -> Result<Self> {
        Self::new(1, dim)
    }

    pub fn curvature(&self) -> Curvature {
        self.curvature
    }

    pub fn delta(&self) -> i8 {
        self.curvature.delta()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Largest admissible geodesic radius.
    pub fn max_radius(&self) -> f64 {
        match self.curvature {
            Curvature::Spherical => FRAC_PI_2,
            _ => f64::INFINITY,
        }
    }

    pub fn check_radius<T: Real>(&self, r: T) -> Result<()> {
        if r.is_nan() || r < T::zero() {
            return Err(Error::domain("r", r.as_f64(), "radius must be nonnegative"));
        }
        if self.curvature == Curvature::Spherical && r > T::FRAC_PI_2() {
            return Err(Error::domain("r", r.as_f64(), "radius exceeds pi/2 in the hemisphere"));
        }
        Ok(())
    }
}

impl std::fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = match self.curvature {
            Curvature::Hyperbolic => "h",
            Curvature::Flat => "e",
            Curvature::Spherical => "s+",
        };
        write!(f, "{tag}:{}", self.dim)
    }
}

/// A unit vector in the tangent space at the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Direction(Vec<f64>);

impl Direction {
    /// Accepts `coords` only if its norm is 1 within `1e-12`.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let norm = coords.iter().map(|x| x * x).sum::<f64>().sqrt();
        if coords.is_empty() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::domain("direction norm", norm, "direction must be a unit vector"));
        }
        Ok(Self(coords))
    }

    /// Rescales a nonzero vector to unit length.
    pub fn normalized(mut coords: Vec<f64>) -> Result<Self> {
        let norm = coords.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::domain("direction norm", norm, "cannot normalize"));
        }
        coords.iter_mut().for_each(|x| *x /= norm);
        Ok(Self(coords))
    }

    /// The `i`-th standard basis vector of `R^n`.
    pub fn axis(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        self.0.iter().zip(other).map(|(a, b)| a * b).sum()
    }
}

impl TryFrom<Vec<f64>> for Direction {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Direction::new(v)
    }
}

impl From<Direction> for Vec<f64> {
    fn from(d: Direction) -> Self {
        d.0
    }
}

impl std::ops::Deref for Direction {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// `s_δ(r)`: `sinh r`, `r` or `sin r`.
pub fn metric_sine<T: Real>(space: &SpaceSpec, r: T) -> Result<T> {
    space.check_radius(r)?;
    Ok(sine_unchecked(space.curvature, r))
}

pub(crate) fn sine_unchecked<T: Real>(c: Curvature, r: T) -> T {
    match c {
        Curvature::Hyperbolic => r.sinh(),
        Curvature::Flat => r,
        Curvature::Spherical => r.sin(),
    }
}

/// `φ_m(x) = ∫_0^x s_δ(t)^{m-1} dt` for `m ≥ 1`.
pub fn phi<T: Real>(space: &SpaceSpec, m: usize, x: T) -> Result<T> {
    space.check_radius(x)?;
    phi_unchecked(space.curvature, m, x)
}

pub(crate) fn phi_unchecked<T: Real>(c: Curvature, m: usize, x: T) -> Result<T> {
    if m == 0 {
        return Err(Error::domain("m", 0.0, "need m >= 1"));
    }
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let four = T::lit(4.0);
    if x == T::zero() {
        return Ok(T::zero());
    }
    let v = match (c, m) {
        (_, 1) => x,
        (Curvature::Flat, _) => x.powi(m as i32) / T::from_usize_lossy(m),
        (Curvature::Spherical, 2) => two * (x / two).sin().powi(2),
        (Curvature::Hyperbolic, 2) => two * (x / two).sinh().powi(2),
        (Curvature::Spherical, 3) => y_minus_sin_y(two * x) / four,
        (Curvature::Hyperbolic, 3) => sinh_y_minus_y(two * x) / four,
        (Curvature::Spherical, 4) => {
            // 1 - cos x = 2 sin²(x/2)
            let one_minus_c = two * (x / two).sin().powi(2);
            one_minus_c * one_minus_c * (three - one_minus_c) / three
        }
        (Curvature::Hyperbolic, 4) => {
            let c_minus_one = two * (x / two).sinh().powi(2);
            c_minus_one * c_minus_one * (c_minus_one + three) / three
        }
        _ => return sine_power_integral(c, m - 1, T::zero(), x),
    };
    Ok(v)
}

/// `∫_a^b s_δ(t)^p dt` by adaptive quadrature.
pub(crate) fn sine_power_integral<T: Real>(c: Curvature, p: usize, a: T, b: T) -> Result<T> {
    let opts = AdaptiveOptions {
        abs_tol: T::lit(1e-12).max(T::epsilon() * T::lit(16.0)),
        rel_tol: T::epsilon() * T::lit(64.0),
        max_subdivisions: 2000,
    };
    let r = integrate_adaptive(|t: T| sine_unchecked(c, t).powi(p as i32), a, b, opts)?;
    Ok(r.value)
}

fn y_minus_sin_y<T: Real>(y: T) -> T {
    if y.abs() < T::lit(0.5) {
        odd_tail_series(y, -T::one())
    } else {
        y - y.sin()
    }
}

fn sinh_y_minus_y<T: Real>(y: T) -> T {
    if y.abs() < T::lit(0.5) {
        odd_tail_series(y, T::one())
    } else {
        y.sinh() - y
    }
}

// Σ_{k≥1} σ^{k+1} y^{2k+1}/(2k+1)!: y - sin y for σ = -1, sinh y - y for σ = 1.
fn odd_tail_series<T: Real>(y: T, sigma: T) -> T {
    let y2 = y * y;
    let mut term = y * y2 / T::lit(6.0);
    let mut sum = term;
    for k in 1..40usize {
        let a = T::from_usize_lossy(2 * k + 2);
        let b = T::from_usize_lossy(2 * k + 3);
        term = term * sigma * y2 / (a * b);
        sum = sum + term;
        if term.abs() <= T::epsilon() * sum.abs() {
            break;
        }
    }
    sum
}

/// `∫_0^θ sin^{m-1} t dt` for `θ ∈ [0, π]`, the spherical `φ_m` continued
/// past the hemisphere.
pub(crate) fn sphere_phi_full<T: Real>(m: usize, theta: T) -> Result<T> {
    let pi = T::PI();
    if theta.is_nan() || theta < T::zero() || theta > pi {
        return Err(Error::domain("theta", theta.as_f64(), "need 0 <= theta <= pi"));
    }
    if theta <= T::FRAC_PI_2() {
        return phi_unchecked(Curvature::Spherical, m, theta);
    }
    let half = phi_unchecked(Curvature::Spherical, m, T::FRAC_PI_2())?;
    Ok(half + half - phi_unchecked(Curvature::Spherical, m, pi - theta)?)
}

/// Inverse of `φ_m` on the admissible radius range.
pub fn phi_inverse<T: Real>(space: &SpaceSpec, m: usize, y: T) -> Result<T> {
    let c = space.curvature;
    let hi = if c == Curvature::Spherical {
        T::FRAC_PI_2()
    } else {
        T::infinity()
    };
    if y < T::zero() {
        return Err(Error::domain("y", y.as_f64(), "phi values are nonnegative"));
    }
    if c == Curvature::Flat {
        return Ok((y * T::from_usize_lossy(m)).powf(T::one() / T::from_usize_lossy(m)));
    }
    let tol = T::lit(1e-15).max(T::epsilon() * T::lit(4.0));
    invert_increasing(|x| phi_unchecked(c, m, x).unwrap_or(T::nan()), y, T::zero(), hi, tol)
}

/// Radial coordinate in the unit-ball model: `tanh(r/2)`, `r/2` or `tan(r/2)`.
pub fn ball_model_radius<T: Real>(space: &SpaceSpec, r: T) -> Result<T> {
    space.check_radius(r)?;
    let h = r / T::lit(2.0);
    Ok(match space.curvature {
        Curvature::Hyperbolic => h.tanh(),
        Curvature::Flat => h,
        Curvature::Spherical => h.tan(),
    })
}

/// Inverse of [`ball_model_radius`].
pub fn ball_model_radius_inverse<T: Real>(space: &SpaceSpec, t: T) -> Result<T> {
    if t.is_nan() || t < T::zero() {
        return Err(Error::domain("t", t.as_f64(), "model radius must be nonnegative"));
    }
    let two = T::lit(2.0);
    match space.curvature {
        Curvature::Hyperbolic if t >= T::one() => {
            Err(Error::domain("t", t.as_f64(), "hyperbolic model radius must be < 1"))
        }
        Curvature::Hyperbolic => Ok(two * t.atanh()),
        Curvature::Flat => Ok(two * t),
        Curvature::Spherical if t > T::one() => {
            Err(Error::domain("t", t.as_f64(), "hemisphere model radius must be <= 1"))
        }
        Curvature::Spherical => Ok(two * t.atan()),
    }
}

/// Radial function of the gnomonic image: `tan ρ`, with `+∞` at `π/2`.
pub fn gnomonic_radial<T: Real>(rho: T) -> T {
    if rho >= T::FRAC_PI_2() {
        T::infinity()
    } else {
        rho.tan()
    }
}

/// Volume `κ_n` of the Euclidean unit ball.
pub fn unit_ball_volume<T: Real>(n: usize) -> T {
    crate::quadrature::sphere_area::<T>(n - 1) / T::from_usize_lossy(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn all() -> [SpaceSpec; 3] {
        [
            SpaceSpec::hyperbolic(3).unwrap(),
            SpaceSpec::euclidean(3).unwrap(),
            SpaceSpec::hemisphere(3).unwrap(),
        ]
    }

    #[test]
    fn rejects_bad_spaces() {
        assert!(SpaceSpec::new(2, 3).is_err());
        assert!(SpaceSpec::new(0, 1).is_err());
        let s: std::result::Result<SpaceSpec, _> = serde_json::from_str(r#"{"delta":3,"dim":2}"#);
        assert!(s.is_err());
        let s: SpaceSpec = serde_json::from_str(r#"{"delta":-1,"dim":2}"#).unwrap();
        assert_eq!(s, SpaceSpec::hyperbolic(2).unwrap());
    }

    #[test]
    fn sine_examples() {
        let s = SpaceSpec::hemisphere(2).unwrap();
        assert_eq!(metric_sine(&s, 0.0).unwrap(), 0.0);
        assert!((metric_sine(&s, FRAC_PI_2).unwrap() - 1.0).abs() < 1e-16);
        assert!(metric_sine(&s, 1.6).is_err());
        assert!(metric_sine(&s, -0.1).is_err());
        let h = SpaceSpec::hyperbolic(2).unwrap();
        // sinh 1 by its Taylor series
        let series: f64 = (0..12)
            .map(|k| 1.0 / (1..=(2 * k + 1)).map(|j| j as f64).product::<f64>())
            .sum();
        assert!((metric_sine(&h, 1.0).unwrap() - series).abs() < 1e-15);
        assert!((series - 1.175_201_2).abs() < 1e-7);
    }

    #[test]
    fn phi_examples() {
        let s = SpaceSpec::hemisphere(3).unwrap();
        assert!((phi(&s, 2, FRAC_PI_2).unwrap() - 1.0).abs() < 1e-15);
        assert!((phi(&s, 3, FRAC_PI_2).unwrap() - FRAC_PI_4).abs() < 1e-15);
        let e = SpaceSpec::euclidean(3).unwrap();
        assert!((phi(&e, 3, 2.0f64).unwrap() - 8.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn closed_forms_match_quadrature() {
        for space in all() {
            for m in 2..=4 {
                for &x in &[1e-4, 0.03, 0.3, 1.0, 1.5] {
                    let closed: f64 = phi_unchecked(space.curvature(), m, x).unwrap();
                    let quad: f64 = sine_power_integral(space.curvature(), m - 1, 0.0, x).unwrap();
                    assert!(
                        (closed - quad).abs() <= 1e-13 * quad.abs().max(1e-300) + 1e-300,
                        "{space} m={m} x={x}: {closed} vs {quad}"
                    );
                }
            }
        }
    }

    #[test]
    fn taylor_consistency() {
        for space in all() {
            for m in 2..=6 {
                for k in 1..=20 {
                    let x = 0.005 * k as f64;
                    let d = (phi(&space, m, x).unwrap() - x.powi(m as i32) / m as f64).abs();
                    assert!(d <= x.powi(m as i32 + 2), "{space} m={m} x={x}");
                }
            }
        }
    }

    #[test]
    fn model_radius_examples_and_round_trip() {
        let h = SpaceSpec::hyperbolic(2).unwrap();
        let s = SpaceSpec::hemisphere(2).unwrap();
        assert_eq!(ball_model_radius(&h, 0.0).unwrap(), 0.0);
        assert!((ball_model_radius(&s, FRAC_PI_2).unwrap() - 1.0).abs() < 1e-15);
        // numeric inversion of r = ∫_0^t 2/(1-u²) du
        let t = invert_increasing(
            |t: f64| {
                crate::quadrature::integrate_radial(|u| 2.0 / (1.0 - u * u), 0.0, t, 1e-14)
                    .unwrap()
                    .value
            },
            2.0,
            0.0,
            0.99,
            1e-15,
        )
        .unwrap();
        assert!((ball_model_radius(&h, 2.0).unwrap() - t).abs() < 1e-12);
        assert!((t - 0.761_594_2).abs() < 1e-7);
        for space in all() {
            let top = space.max_radius().min(10.0);
            for i in 0..1000 {
                let r = top * i as f64 / 999.0;
                let t = ball_model_radius(&space, r).unwrap();
                let back = ball_model_radius_inverse(&space, t).unwrap();
                assert!((back - r).abs() <= 1e-12, "{space} r={r}");
            }
        }
    }

    #[test]
    fn gnomonic_examples() {
        assert_eq!(gnomonic_radial(0.0), 0.0);
        assert!((gnomonic_radial(FRAC_PI_4) - 1.0f64).abs() < 1e-15);
        assert!((gnomonic_radial(PI / 3.0) - 3f64.sqrt()).abs() < 1e-15);
        assert!(gnomonic_radial(FRAC_PI_2).is_infinite());
    }

    #[test]
    fn inverse_phi() {
        for space in all() {
            for m in [2, 3, 5] {
                for &x in &[0.1, 0.9, 1.5] {
                    let y: f64 = phi(&space, m, x).unwrap();
                    assert!((phi_inverse(&space, m, y).unwrap() - x as f64).abs() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn generic_over_f32() {
        let s = SpaceSpec::hemisphere(3).unwrap();
        let v: f32 = phi(&s, 3, std::f32::consts::FRAC_PI_2).unwrap();
        assert!((v - std::f32::consts::FRAC_PI_4).abs() < 1e-6);
        let v: f32 = phi(&s, 5, 1.0f32).unwrap();
        assert!(v > 0.0);
    }

    #[test]
    fn full_sphere_phi() {
        assert!((sphere_phi_full(3, PI).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((sphere_phi_full(2, 2.0f64).unwrap() - (1.0 - 2.0f64.cos())).abs() < 1e-15);
        assert!((sphere_phi_full(1, 3.0f64).unwrap() - 3.0).abs() < 1e-15);
        assert!(sphere_phi_full(2, 3.2f64).is_err());
    }

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume::<f64>(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume::<f64>(3) - 4.0 * PI / 3.0).abs() < 1e-14);
    }
}
