//! Bracketed scalar root finding.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Brent's method on a sign-changing bracket `[a, b]`.
///
/// Terminates when the bracket is narrower than `xtol` (plus a few ulps of
/// the iterate) or an exact zero is hit.
pub fn brent<T, F>(mut f: F, a: T, b: T, xtol: T, max_iter: usize) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::Solver("objective is NaN at the bracket ends".into()));
    }
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Solver(format!(
            "no sign change on [{}, {}]: f = ({:e}, {:e})",
            a.as_f64(),
            b.as_f64(),
            fa.as_f64(),
            fb.as_f64()
        )));
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = two * T::epsilon() * b.abs() + half * xtol;
        let m = half * (c - b);
        if m.abs() <= tol || fb == T::zero() {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * m * s;
                q = T::one() - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (two * m * qa * (qa - r) - (b - a) * (r - T::one()));
                q = (qa - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            } else {
                p = -p;
            }
            let min1 = T::lit(3.0) * m * q - (tol * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        if d.abs() > tol {
            b = b + d;
        } else {
            b = b + if m > T::zero() { tol } else { -tol };
        }
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::Solver(format!("objective is NaN at {}", b.as_f64())));
        }
    }
    Err(Error::Solver(format!("no convergence after {max_iter} iterations")))
}

/// Inverts a continuous increasing function on `[lo, hi]`, or on `[lo, ∞)`
/// when `hi` is infinite (the bracket is grown by doubling).
pub fn invert_increasing<T, F>(mut f: F, target: T, lo: T, hi: T, xtol: T) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let flo = f(lo);
    if target < flo {
        return Err(Error::domain(
            "target",
            target.as_f64(),
            "below the range of the function",
        ));
    }
    if target == flo {
        return Ok(lo);
    }
    let mut upper = if hi.is_finite() { hi } else { lo + T::one() };
    if !hi.is_finite() {
        let mut grown = 0;
        while f(upper) < target {
            upper = lo + (upper - lo) * T::lit(2.0);
            grown += 1;
            if grown > 2000 || !upper.is_finite() {
                return Err(Error::Solver("could not bracket the inverse".into()));
            }
        }
    } else if f(upper) < target {
        return Err(Error::domain(
            "target",
            target.as_f64(),
            "above the range of the function",
        ));
    }
    brent(|x| f(x) - target, lo, upper, xtol, 200)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cube_root() {
        let x = brent(|x: f64| x * x * x - 2.0, 0.0, 2.0, 1e-15, 100).unwrap();
        assert!((x - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn rejects_bracket_without_sign_change() {
        assert!(brent(|x: f64| x * x + 1.0, -1.0, 1.0, 1e-12, 50).is_err());
    }

    #[test]
    fn inverts_on_half_line() {
        let x = invert_increasing(|x: f64| x.exp(), 1e6, 0.0, f64::INFINITY, 1e-14).unwrap();
        assert!((x - 1e6f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn works_in_single_precision() {
        let x = brent(|x: f32| x.cos() - x, 0.0, 1.0, 1e-7, 100).unwrap();
        assert!((x - 0.739_085_1).abs() < 1e-6);
    }
}
