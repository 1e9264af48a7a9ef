use std::f64::consts::TAU;

use super::profile::RadialProfile;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_adaptive, integrate_pieces, AdaptiveOptions};
use crate::solve::brent;
use crate::spaces::Direction;

const CELLS: usize = 1024;

/// The planar region `{ρ_in(ψ) < r ≤ ρ_out(ψ)}` of `S^2_+` between two
/// radial profiles; without an inner profile the region is star-shaped.
#[derive(Clone, Debug)]
pub struct ShellRegion {
    outer: RadialProfile,
    inner: Option<RadialProfile>,
}

impl ShellRegion {
    pub fn new(outer: RadialProfile, inner: Option<RadialProfile>) -> Self {
        Self { outer, inner }
    }

    /// `K̃ \ K` for radial profiles `k_tilde`, `k`.
    pub fn difference(k_tilde: &RadialProfile, k: &RadialProfile) -> Self {
        Self::new(k_tilde.clone(), Some(k.clone()))
    }

    /// Area per unit angle: `max(0, cos ρ_in - cos ρ_out)`.
    pub fn density(&self, psi: f64) -> f64 {
        let outer = self.outer.radial_angle(psi);
        let inner = self.inner.as_ref().map_or(0.0, |p| p.radial_angle(psi));
        if outer <= inner {
            return 0.0;
        }
        // cos a - cos b = 2 sin((a+b)/2) sin((b-a)/2)
        2.0 * ((outer + inner) / 2.0).sin() * ((outer - inner) / 2.0).sin()
    }

    fn kinks(&self) -> Vec<f64> {
        let mut k = self.outer.kinks();
        if let Some(p) = &self.inner {
            k.extend(p.kinks());
        }
        k
    }

    /// Area of the region.
    pub fn volume(&self) -> Result<f64> {
        let mut k = self.kinks();
        k.sort_by(f64::total_cmp);
        Ok(integrate_pieces(|p| self.density(p), 0.0, TAU, &k, opts())?.value)
    }
}

fn opts() -> AdaptiveOptions<f64> {
    AdaptiveOptions {
        abs_tol: 1e-15,
        rel_tol: 1e-13,
        max_subdivisions: 4000,
    }
}

/// The normalized cumulative angular area of a region, measured
/// counterclockwise from `x0`, and its inverse.
#[derive(Clone, Debug)]
pub struct AngularArea {
    region: ShellRegion,
    x0: f64,
    edges: Vec<f64>,
    cumulative: Vec<f64>,
    total: f64,
    first: usize,
    last: usize,
}

/// Builds the inverse angular area function of `region` from `x0`.
///
/// Fails with a precondition error when `x0` lies inside the angular
/// support while the support is not the whole circle, and with a
/// non-injectivity error when the support has interior gaps.
pub fn inverse_angular_area(region: &ShellRegion, x0: &Direction) -> Result<AngularArea> {
    if x0.dim() != 2 {
        return Err(Error::Unsupported("angular area functions are planar".into()));
    }
    let start = x0[1].atan2(x0[0]);
    let mut edges: Vec<f64> = (0..=CELLS).map(|i| start + TAU * i as f64 / CELLS as f64).collect();
    edges.extend(
        region
            .kinks()
            .into_iter()
            .map(|k| start + (k - start).rem_euclid(TAU))
            .filter(|&k| k > start && k < start + TAU),
    );
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let mut cells = Vec::with_capacity(edges.len() - 1);
    for w in edges.windows(2) {
        cells.push(integrate_adaptive(|p| region.density(p), w[0], w[1], opts())?.value);
    }
    let total: f64 = cells.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Precondition("region has zero area".into()));
    }
    let positive = |c: f64| c > 1e-14 * total;
    let first = cells.iter().position(|&c| positive(c)).unwrap_or(0);
    let last = cells.iter().rposition(|&c| positive(c)).unwrap_or(0);
    let all = cells.iter().all(|&c| positive(c));
    if !all && region.density(start) > 0.0 {
        return Err(Error::Precondition(format!(
            "x0 at angle {start} lies inside the angular support"
        )));
    }
    if let Some(gap) = (first..=last).find(|&i| !positive(cells[i])) {
        return Err(Error::NonInjective(format!(
            "angular density vanishes on [{}, {}] inside the support",
            edges[gap],
            edges[gap + 1]
        )));
    }
    let mut cumulative = vec![0.0];
    let mut acc = 0.0;
    for c in &cells {
        acc += c;
        cumulative.push(acc);
    }
    Ok(AngularArea {
        region: region.clone(),
        x0: start,
        edges,
        cumulative,
        total,
        first,
        last,
    })
}

impl AngularArea {
    pub fn total(&self) -> f64 {
        self.total
    }

    /// Angle of `x0` (the origin of measurement).
    pub fn origin(&self) -> f64 {
        self.x0
    }

    /// `f(x)`: normalized area of the region inside `cone(x0, x)`, for `x`
    /// given as an absolute angle.
    pub fn fraction(&self, x: f64) -> f64 {
        self.fraction_offset((x - self.x0).rem_euclid(TAU))
    }

    /// `f` at the angle `x0 + offset`, `offset ∈ [0, 2π]`.
    pub fn fraction_offset(&self, offset: f64) -> f64 {
        let x = self.x0 + offset.clamp(0.0, TAU);
        let i = match self.edges.partition_point(|&e| e <= x) {
            0 => return 0.0,
            i if i >= self.edges.len() => return 1.0,
            i => i - 1,
        };
        let part = integrate_adaptive(|p| self.region.density(p), self.edges[i], x, opts())
            .map(|r| r.value)
            .unwrap_or(f64::NAN);
        ((self.cumulative[i] + part) / self.total).clamp(0.0, 1.0)
    }

    /// `f^{-1}(t)` as an absolute angle in `[x0, x0 + 2π]`.
    pub fn inverse(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::domain("t", t, "need 0 <= t <= 1"));
        }
        let (lo, hi) = if t <= 0.0 {
            (self.edges[self.first], self.edges[self.first + 1])
        } else if t >= 1.0 {
            (self.edges[self.last], self.edges[self.last + 1])
        } else {
            let target = t * self.total;
            let i = self
                .cumulative
                .partition_point(|&c| c < target)
                .clamp(1, self.edges.len() - 1)
                - 1;
            (self.edges[i], self.edges[i + 1])
        };
        let off = |x: f64| x - self.x0;
        if t <= 0.0 || t >= 1.0 {
            // edge of the support: bisect on f(x) > 0 or f(x) < 1
            let inside = |x: f64| {
                let f = self.fraction_offset(off(x));
                if t <= 0.0 {
                    f > 0.0
                } else {
                    f >= 1.0
                }
            };
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if inside(m) {
                    b = m;
                } else {
                    a = m;
                }
                if b - a < 1e-14 {
                    break;
                }
            }
            return Ok(if t <= 0.0 { a } else { b });
        }
        brent(|x| self.fraction_offset(off(x)) - t, lo, hi, 1e-14, 200)
    }
}

/// Both sides of the comparison
/// `∫(ρ_{K̃}² - ρ_K²) > vol(K \ K̃) ∫_0^1 [F(ρ_K(ζ⁺)) - F(ρ_K(ζ⁻))] dt`,
/// `F(x) = 2x / sin x`, where `ζ^±` are the inverse angular area functions
/// of `K̃ \ K` and `K \ K̃` from a common direction outside both.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExchangeComparison {
    pub lhs: f64,
    pub rhs: f64,
    pub gained: f64,
    pub lost: f64,
    /// `min_t [ρ_K(ζ⁺(t)) - ρ_K(ζ⁻(t))]` over a grid of `t`.
    pub min_ordering: f64,
}

pub fn exchange_comparison(k: &RadialProfile, k_tilde: &RadialProfile) -> Result<ExchangeComparison> {
    let plus = ShellRegion::difference(k_tilde, k);
    let minus = ShellRegion::difference(k, k_tilde);
    let (gained, lost) = (plus.volume()?, minus.volume()?);
    if !(gained > 0.0 && lost > 0.0) || (gained - lost).abs() > 1e-8 * gained.max(lost) {
        return Err(Error::Precondition(format!(
            "exchanged areas must be positive and equal, got {gained} and {lost}"
        )));
    }
    let probes = 4096;
    let empty: Vec<bool> = (0..probes)
        .map(|i| {
            let p = TAU * (i as f64 + 0.5) / probes as f64;
            plus.density(p) == 0.0 && minus.density(p) == 0.0
        })
        .collect();
    let x0 = longest_run_center(&empty)
        .map(|i| TAU * (i + 0.5) / probes as f64)
        .ok_or_else(|| Error::Precondition("no direction outside both difference regions".into()))?;
    let dir = Direction::new(vec![x0.cos(), x0.sin()])?;
    let zp = inverse_angular_area(&plus, &dir)?;
    let zm = inverse_angular_area(&minus, &dir)?;
    let f = |x: f64| if x == 0.0 { 2.0 } else { 2.0 * x / x.sin() };
    let mut failure = None;
    let integrand = |t: f64| match (zp.inverse(t), zm.inverse(t)) {
        (Ok(a), Ok(b)) => f(k.radial_angle(a)) - f(k.radial_angle(b)),
        (Err(e), _) | (_, Err(e)) => {
            failure = Some(e);
            f64::NAN
        }
    };
    let inner = integrate_adaptive(
        integrand,
        0.0,
        1.0,
        AdaptiveOptions {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 400,
        },
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let rhs = lost * inner?.value;
    let mut kinks = k.kinks();
    kinks.extend(k_tilde.kinks());
    kinks.sort_by(f64::total_cmp);
    let lhs = integrate_pieces(
        |p| k_tilde.radial_angle(p).powi(2) - k.radial_angle(p).powi(2),
        0.0,
        TAU,
        &kinks,
        opts(),
    )?
    .value;
    let mut min_ordering = f64::INFINITY;
    for i in 0..=200 {
        let t = i as f64 / 200.0;
        let d = k.radial_angle(zp.inverse(t)?) - k.radial_angle(zm.inverse(t)?);
        min_ordering = min_ordering.min(d);
    }
    Ok(ExchangeComparison {
        lhs,
        rhs,
        gained,
        lost,
        min_ordering,
    })
}

fn longest_run_center(flags: &[bool]) -> Option<f64> {
    let n = flags.len();
    let mut best: Option<(usize, usize)> = None;
    let mut i = 0;
    // runs may wrap around; scan twice the length
    while i < n {
        if flags[i] && !flags[(i + n - 1) % n] || (flags[i] && i == 0 && flags.iter().all(|&f| f)) {
            let mut len = 0;
            while len < n && flags[(i + len) % n] {
                len += 1;
            }
            if best.is_none_or(|(_, l)| len > l) {
                best = Some((i, len));
            }
        }
        i += 1;
    }
    best.map(|(s, l)| (s as f64 + (l as f64 - 1.0) / 2.0).rem_euclid(n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{CircleGrid, ConeBase};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn dir(a: f64) -> Direction {
        Direction::new(vec![a.cos(), a.sin()]).unwrap()
    }

    #[test]
    fn cone_over_arc_is_linear() {
        let cone = RadialProfile::Cone {
            base: ConeBase::arcs(vec![[0.5, 1.5]]).unwrap(),
            radius: FRAC_PI_2,
        };
        let a = inverse_angular_area(&ShellRegion::new(cone, None), &dir(0.0)).unwrap();
        assert!((a.total() - 1.0).abs() < 1e-12);
        for t in [0.0, 0.25, 0.5, 0.9, 1.0] {
            assert!((a.inverse(t).unwrap() - (0.5 + t)).abs() < 1e-9, "t={t}");
        }
        for t in [0.1, 0.37, 0.8] {
            assert!((a.fraction(a.inverse(t).unwrap()) - t).abs() < 1e-8);
        }
    }

    #[test]
    fn sector_with_linear_density() {
        // outer radius with 1 - cos ρ = ψ on [0.2, 1.2] has density ψ there
        let nodes = 2048;
        let values: Vec<f64> = (0..nodes)
            .map(|j| {
                let p = TAU * j as f64 / nodes as f64;
                if (0.2..=1.2).contains(&p) {
                    (1.0 - p).acos()
                } else {
                    1e-9
                }
            })
            .collect();
        let outer = RadialProfile::Grid(CircleGrid { values: values.clone() });
        let inner = RadialProfile::Grid(CircleGrid {
            values: vec![1e-9; nodes],
        });
        let a = inverse_angular_area(&ShellRegion::new(outer, Some(inner)), &dir(-1.0)).unwrap();
        // cumulative ∫_{0.2}^x ψ dψ = (x² - 0.04)/2 over a total of 0.7
        for t in [0.2f64, 0.5, 0.8] {
            let want = (0.04 + 2.0 * 0.7 * t).sqrt();
            let got = a.inverse(t).unwrap().rem_euclid(TAU);
            assert!((got - want).abs() < 2e-3, "t={t}: {got} vs {want}");
        }
    }

    #[test]
    fn errors() {
        let cone = RadialProfile::Cone {
            base: ConeBase::arcs(vec![[0.5, 1.5], [3.0, 3.5]]).unwrap(),
            radius: FRAC_PI_2,
        };
        let region = ShellRegion::new(cone, None);
        assert!(matches!(
            inverse_angular_area(&region, &dir(0.0)),
            Err(Error::NonInjective(_))
        ));
        let one = RadialProfile::Cone {
            base: ConeBase::arcs(vec![[0.5, 1.5]]).unwrap(),
            radius: FRAC_PI_2,
        };
        assert!(matches!(
            inverse_angular_area(&ShellRegion::new(one, None), &dir(1.0)),
            Err(Error::Precondition(_))
        ));
        let ball = RadialProfile::Ball { r: 0.4 };
        assert!(inverse_angular_area(&ShellRegion::new(ball, None), &dir(PI)).is_ok());
    }

    #[test]
    fn run_center_wraps() {
        let mut f = vec![false; 10];
        f[9] = true;
        f[0] = true;
        f[1] = true;
        assert!((longest_run_center(&f).unwrap() - 0.0).abs() < 1e-12);
    }
}
