//! Zonal spherical harmonics, the spherical Radon transform and its
//! multipliers.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::quadrature::{gauss_jacobi_symmetric, sphere_area, SphereRule, SubsphereRule};
use crate::scalar::Real;

/// Gegenbauer polynomial `C_k^{λ}(t)` by upward recurrence; for `λ = 0` the
/// Chebyshev polynomial `T_k(t)` is returned instead.
pub fn gegenbauer<T: Real>(k: usize, lambda: T, t: T) -> T {
    let two = T::lit(2.0);
    if lambda == T::zero() {
        let (mut prev, mut cur) = (T::one(), t);
        if k == 0 {
            return prev;
        }
        for _ in 1..k {
            let next = two * t * cur - prev;
            prev = cur;
            cur = next;
        }
        return cur;
    }
    let (mut prev, mut cur) = (T::one(), two * lambda * t);
    if k == 0 {
        return prev;
    }
    for j in 1..k {
        let j = T::from_usize_lossy(j);
        let next = (two * t * (j + lambda) * cur - (j + two * lambda - T::one()) * prev) / (j + T::one());
        prev = cur;
        cur = next;
    }
    cur
}

/// A zonal harmonic of degree `k` on `S^{n-1}` with unit `L²` norm.
#[derive(Clone, Debug)]
pub struct ZonalHarmonic<T> {
    n: usize,
    degree: usize,
    axis: Vec<T>,
    scale: T,
}

impl<T: Real> ZonalHarmonic<T> {
    pub fn new(n: usize, degree: usize, axis: &[T]) -> Result<Self> {
        if n < 2 || axis.len() != n {
            return Err(Error::domain("n", n as f64, "axis must live in R^n with n >= 2"));
        }
        let norm = axis.iter().map(|&x| x * x).sum::<T>().sqrt();
        if !(norm > T::zero()) {
            return Err(Error::domain("axis", 0.0, "axis must be nonzero"));
        }
        let axis: Vec<T> = axis.iter().map(|&x| x / norm).collect();
        // ‖P(⟨·,a⟩)‖² = |S^{n-2}| ∫ P(t)² (1-t²)^{(n-3)/2} dt, exact for q = k + 1 nodes.
        let lambda = (n as f64 - 2.0) / 2.0;
        let pairs = gauss_jacobi_symmetric(degree + 1, (n as f64 - 3.0) / 2.0)?;
        let sq: f64 = pairs
            .iter()
            .map(|&(t, w)| w * gegenbauer(degree, lambda, t).powi(2))
            .sum::<f64>()
            * sphere_area::<f64>(n - 2);
        Ok(Self {
            n,
            degree,
            axis,
            scale: T::lit(1.0 / sq.sqrt()),
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn axis(&self) -> &[T] {
        &self.axis
    }

    /// Value as a function of `t = ⟨u, axis⟩`.
    pub fn profile(&self, t: T) -> T {
        let lambda = T::from_usize_lossy(self.n - 2) / T::lit(2.0);
        self.scale * gegenbauer(self.degree, lambda, t.max(-T::one()).min(T::one()))
    }

    pub fn eval(&self, u: &[T]) -> T {
        let t = u.iter().zip(&self.axis).map(|(&a, &b)| a * b).sum::<T>();
        self.profile(t)
    }
}

/// `λ_k`, the eigenvalue of the spherical Radon transform on degree-`k`
/// harmonics of `S^{n-1}`.
pub fn radon_multiplier<T: Real>(n: usize, k: usize) -> Result<T> {
    if n < 3 {
        return Err(Error::Unsupported(format!(
            "Radon multipliers need n >= 3 (got n = {n})"
        )));
    }
    if k % 2 == 1 {
        return Ok(T::zero());
    }
    let kf = k as f64;
    let nf = n as f64;
    let log_mag = (2.0f64).ln() + (nf - 2.0) / 2.0 * std::f64::consts::PI.ln() + ln_gamma((kf + 1.0) / 2.0)
        - ln_gamma((nf + kf - 1.0) / 2.0);
    let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(T::lit(sign * log_mag.exp()))
}

/// `λ_k` for even `k ≤ k_max` (odd entries are zero).
#[derive(Clone, Debug)]
pub struct MultiplierTable<T> {
    n: usize,
    values: Vec<T>,
}

impl<T: Real> MultiplierTable<T> {
    pub fn new(n: usize, k_max: usize) -> Result<Self> {
        let values = (0..=k_max)
            .map(|k| radon_multiplier(n, k))
            .collect::<Result<Vec<T>>>()?;
        Ok(Self { n, values })
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, k: usize) -> Option<T> {
        self.values.get(k).copied()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }
}

/// `Rf(ξ) = ∫_{S^{n-1} ∩ ξ^⊥} f` with a rule on `S^{n-2}`.
pub fn radon_quadrature<T, F>(f: F, rule: &SphereRule<T>, xi: &[T]) -> Result<T>
where
    T: Real,
    F: FnMut(&[T]) -> T,
{
    Ok(SubsphereRule::new(rule, xi)?.integrate(f))
}

/// Both sides of `‖Rf‖_{L²} ≤ |S^{n-2}| ‖f‖_{L²}`, each by quadrature.
pub fn radon_l2_bound_check<T, F>(f: F, outer: &SphereRule<T>, inner: &SphereRule<T>) -> Result<(T, T)>
where
    T: Real,
    F: Fn(&[T]) -> T + Sync,
{
    let n = outer.dim() + 1;
    if inner.dim() + 2 != n {
        return Err(Error::domain(
            "inner.dim",
            inner.dim() as f64,
            "inner rule must live on S^{n-2}",
        ));
    }
    let rf_sq = outer.integrate(|xi| {
        SubsphereRule::new(inner, xi)
            .map(|s| s.integrate(&f))
            .map(|v| v * v)
            .unwrap_or(T::nan())
    });
    let f_sq = outer.integrate(|u| f(u) * f(u));
    Ok((rf_sq.sqrt(), sphere_area::<T>(n - 2) * f_sq.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_harmonic_value() {
        let h = ZonalHarmonic::<f64>::new(3, 0, &[0.0, 0.0, 1.0]).unwrap();
        assert!((h.eval(&[1.0, 0.0, 0.0]) - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn degree_two_equator_value() {
        let h = ZonalHarmonic::<f64>::new(3, 2, &[0.0, 0.0, 1.0]).unwrap();
        let expected = -0.5 * (5.0 / (4.0 * PI)).sqrt();
        assert!((h.eval(&[1.0, 0.0, 0.0]) - expected).abs() < 1e-14);
        let u = [0.3, -0.4, (1.0f64 - 0.25).sqrt()];
        let m = [-0.3, 0.4, -(1.0f64 - 0.25).sqrt()];
        assert!((h.eval(&u) - h.eval(&m)).abs() < 1e-15);
    }

    #[test]
    fn normalized_and_mean_zero_under_rules() {
        for n in 2..=5 {
            for k in 0..=8 {
                let mut axis = vec![0.3; n];
                axis[0] = -0.7;
                let h = ZonalHarmonic::<f64>::new(n, k, &axis).unwrap();
                let rule = SphereRule::<f64>::new(n - 1, 2 * k + 1).unwrap();
                let sq = rule.integrate(|u| h.eval(u).powi(2));
                assert!((sq - 1.0).abs() < 1e-8, "n={n} k={k} {sq}");
                if k >= 1 {
                    assert!(rule.integrate(|u| h.eval(u)).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn gegenbauer_reduces_to_legendre() {
        let t = 0.37f64;
        assert!((gegenbauer(2, 0.5, t) - (3.0 * t * t - 1.0) / 2.0).abs() < 1e-15);
        assert!((gegenbauer(3, 0.0, t) - (4.0 * t.powi(3) - 3.0 * t)).abs() < 1e-15);
    }

    #[test]
    fn multiplier_examples() {
        assert!((radon_multiplier::<f64>(3, 0).unwrap() - 2.0 * PI).abs() < 1e-13);
        assert!((radon_multiplier::<f64>(3, 2).unwrap() + PI).abs() < 1e-13);
        assert!((radon_multiplier::<f64>(3, 4).unwrap() - 3.0 * PI / 4.0).abs() < 1e-13);
        assert_eq!(radon_multiplier::<f64>(3, 1).unwrap(), 0.0);
        assert!(radon_multiplier::<f64>(2, 0).is_err());
        for n in [3, 4, 5] {
            let l0 = radon_multiplier::<f64>(n, 0).unwrap();
            assert!((l0 - sphere_area::<f64>(n - 2)).abs() < 1e-12);
        }
    }

    #[test]
    fn multipliers_decrease() {
        for n in [3, 4] {
            let table = MultiplierTable::<f64>::new(n, 32).unwrap();
            for k in (0..=30).step_by(2) {
                assert!(table.get(k + 2).unwrap().abs() < table.get(k).unwrap().abs());
            }
        }
    }

    #[test]
    fn radon_of_constant_and_odd() {
        let rule = SphereRule::<f64>::new(1, 15).unwrap();
        let xi = [0.36, 0.48, 0.8];
        assert!((radon_quadrature(|_| 1.0, &rule, &xi).unwrap() - 2.0 * PI).abs() < 1e-12);
        let odd = radon_quadrature(|u| u[0] + u[1].powi(3) - 2.0 * u[2], &rule, &xi).unwrap();
        assert!(odd.abs() < 1e-12);
    }

    #[test]
    fn radon_of_degree_two_at_axis() {
        let h = ZonalHarmonic::<f64>::new(3, 2, &[0.0, 0.0, 1.0]).unwrap();
        let rule = SphereRule::<f64>::new(1, 15).unwrap();
        let e3 = [0.0, 0.0, 1.0];
        let r = radon_quadrature(|u| h.eval(u), &rule, &e3).unwrap();
        assert!((r - (-PI) * h.eval(&e3)).abs() < 1e-12);
    }

    #[test]
    fn l2_bound_ratio_for_degree_four() {
        let h = ZonalHarmonic::<f64>::new(3, 4, &[0.0, 0.6, 0.8]).unwrap();
        let outer = SphereRule::<f64>::new(2, 17).unwrap();
        let inner = SphereRule::<f64>::new(1, 17).unwrap();
        let (lhs, rhs) = radon_l2_bound_check(|u| h.eval(u), &outer, &inner).unwrap();
        assert!((lhs / rhs - 3.0 / 8.0).abs() < 1e-10);
        let (lhs, rhs) = radon_l2_bound_check(|_| 2.5, &outer, &inner).unwrap();
        assert!((lhs - rhs).abs() < 1e-10 * rhs);
    }
}
