use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::sphere_area;
use crate::solve::brent;
use crate::spaces::{sphere_phi_full, Direction};

/// A measurable subset `A ⊆ S^{n-1}` with analytic measure and sections.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConeBase {
    /// Disjoint counterclockwise arcs `[start, end]` of the unit circle (`n = 2`).
    Arcs { arcs: Vec<[f64; 2]> },
    /// The set `{x : ⟨x, axis⟩ ∈ ∪ bands}` for disjoint bands in `[-1, 1]`.
    Zonal { axis: Direction, bands: Vec<[f64; 2]> },
}

fn wrap(a: f64) -> f64 {
    a.rem_euclid(TAU)
}

impl ConeBase {
    pub fn arcs(arcs: Vec<[f64; 2]>) -> Result<Self> {
        let base = ConeBase::Arcs { arcs };
        base.validate(2)?;
        Ok(base)
    }

    pub fn zonal(axis: Direction, bands: Vec<[f64; 2]>) -> Result<Self> {
        let n = axis.dim();
        let base = ConeBase::Zonal { axis, bands };
        base.validate(n)?;
        Ok(base)
    }

    /// The cap `{⟨x, axis⟩ ≥ a}`.
    pub fn cap(axis: Direction, a: f64) -> Result<Self> {
        Self::zonal(axis, vec![[a, 1.0]])
    }

    /// The whole sphere.
    pub fn full(n: usize) -> Result<Self> {
        Self::zonal(Direction::axis(n, n - 1), vec![[-1.0, 1.0]])
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            ConeBase::Arcs { arcs } => {
                if n != 2 {
                    return Err(Error::Unsupported("arc bases live on S^1 (n = 2)".into()));
                }
                let mut total = 0.0;
                for a in arcs {
                    let len = a[1] - a[0];
                    if !(len >= 0.0 && len <= TAU && a[0].is_finite()) {
                        return Err(Error::domain("arc length", len, "need 0 <= end - start <= 2 pi"));
                    }
                    total += len;
                }
                if total > TAU + 1e-12 {
                    return Err(Error::domain("arc total", total, "arcs overlap"));
                }
                let mut starts: Vec<(f64, f64)> = arcs.iter().map(|a| (wrap(a[0]), a[1] - a[0])).collect();
                starts.sort_by(|x, y| x.0.total_cmp(&y.0));
                for w in starts.windows(2) {
                    if w[0].0 + w[0].1 > w[1].0 + 1e-12 {
                        return Err(Error::domain("arc start", w[1].0, "arcs overlap"));
                    }
                }
                if let (Some(first), Some(last)) = (starts.first(), starts.last()) {
                    if starts.len() > 1 && last.0 + last.1 > first.0 + TAU + 1e-12 {
                        return Err(Error::domain("arc start", first.0, "arcs overlap"));
                    }
                }
                Ok(())
            }
            ConeBase::Zonal { axis, bands } => {
                if axis.dim() != n {
                    return Err(Error::domain("axis dimension", axis.dim() as f64, "must equal n"));
                }
                let mut sorted = bands.clone();
                sorted.sort_by(|x, y| x[0].total_cmp(&y[0]));
                for b in &sorted {
                    if !(-1.0 <= b[0] && b[0] <= b[1] && b[1] <= 1.0) {
                        return Err(Error::domain("band", b[0], "need -1 <= lo <= hi <= 1"));
                    }
                }
                for w in sorted.windows(2) {
                    if w[0][1] > w[1][0] {
                        return Err(Error::domain("band", w[1][0], "bands overlap"));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn contains(&self, u: &[f64]) -> bool {
        match self {
            ConeBase::Arcs { .. } => self.contains_angle(u[1].atan2(u[0])),
            ConeBase::Zonal { axis, bands } => {
                let t = axis.dot(u);
                bands.iter().any(|b| b[0] <= t && t <= b[1])
            }
        }
    }

    /// Membership of `(cos ψ, sin ψ)`.
    pub fn contains_angle(&self, psi: f64) -> bool {
        match self {
            ConeBase::Arcs { arcs } => arcs.iter().any(|a| {
                let len = a[1] - a[0];
                len >= TAU || wrap(psi - a[0]) <= len
            }),
            ConeBase::Zonal { .. } => self.contains(&[psi.cos(), psi.sin()]),
        }
    }

    /// `|A|` as a subset of `S^{n-1}`.
    pub fn measure(&self, n: usize) -> f64 {
        match self {
            ConeBase::Arcs { arcs } => arcs.iter().map(|a| a[1] - a[0]).sum(),
            ConeBase::Zonal { bands, .. } => {
                let area = sphere_area::<f64>(n - 2);
                bands.iter().map(|b| area * band_polar_measure(n - 1, b[0], b[1])).sum()
            }
        }
    }

    /// `|A ∩ ξ^⊥|` as a subset of the great subsphere `S^{n-1} ∩ ξ^⊥`
    /// (counting measure when `n = 2`).
    pub fn section_measure(&self, xi: &[f64]) -> f64 {
        let n = xi.len();
        match self {
            ConeBase::Arcs { .. } => {
                let p = xi[0].atan2(-xi[1]);
                self.contains_angle(p) as u8 as f64 + self.contains_angle(p + PI) as u8 as f64
            }
            ConeBase::Zonal { axis, bands } => {
                let c = axis.dot(xi).clamp(-1.0, 1.0);
                zonal_section(n, bands, (1.0 - c * c).sqrt())
            }
        }
    }

    /// Angles `ψ` at which `A ∩ S^1` has an endpoint (`n = 2`).
    pub fn boundary_angles(&self) -> Vec<f64> {
        match self {
            ConeBase::Arcs { arcs } => arcs.iter().flat_map(|a| [wrap(a[0]), wrap(a[1])]).collect(),
            ConeBase::Zonal { axis, bands } => {
                let a0 = axis[1].atan2(axis[0]);
                bands
                    .iter()
                    .flat_map(|b| [b[0], b[1]])
                    .filter(|t| t.abs() < 1.0)
                    .flat_map(|t| [wrap(a0 + t.acos()), wrap(a0 - t.acos())])
                    .collect()
            }
        }
    }

    pub fn band_count(&self) -> usize {
        match self {
            ConeBase::Arcs { arcs } => arcs.len(),
            ConeBase::Zonal { bands, .. } => bands.len(),
        }
    }

    /// `A = -A`.
    pub fn is_symmetric(&self) -> bool {
        match self {
            ConeBase::Arcs { arcs } => {
                let mut a: Vec<(f64, f64)> = arcs.iter().map(|a| (wrap(a[0]), a[1] - a[0])).collect();
                let mut b: Vec<(f64, f64)> = arcs.iter().map(|a| (wrap(a[0] + PI), a[1] - a[0])).collect();
                a.sort_by(|x, y| x.0.total_cmp(&y.0));
                b.sort_by(|x, y| x.0.total_cmp(&y.0));
                a.len() == b.len()
                    && a.iter().zip(&b).all(|(x, y)| {
                        let d = (x.0 - y.0).abs();
                        (d < 1e-12 || (TAU - d) < 1e-12) && (x.1 - y.1).abs() < 1e-12
                    })
            }
            ConeBase::Zonal { bands, .. } => {
                let mut a: Vec<[f64; 2]> = bands.clone();
                let mut b: Vec<[f64; 2]> = bands.iter().map(|x| [-x[1], -x[0]]).collect();
                a.sort_by(|x, y| x[0].total_cmp(&y[0]));
                b.sort_by(|x, y| x[0].total_cmp(&y[0]));
                a.iter()
                    .zip(&b)
                    .all(|(x, y)| (x[0] - y[0]).abs() < 1e-12 && (x[1] - y[1]).abs() < 1e-12)
            }
        }
    }

    /// `A ∪ (-A)` for a base disjoint from its reflection.
    pub fn with_reflection(&self) -> Result<Self> {
        match self {
            ConeBase::Arcs { arcs } => {
                let mut all = arcs.clone();
                all.extend(arcs.iter().map(|a| [a[0] + PI, a[1] + PI]));
                Self::arcs(all)
            }
            ConeBase::Zonal { axis, bands } => {
                let mut all = bands.clone();
                all.extend(bands.iter().map(|b| [-b[1], -b[0]]));
                Self::zonal(axis.clone(), all)
            }
        }
    }
}

/// `∫` of `sin^{m-1}` over the polar angles with `cos θ ∈ [lo, hi]`.
fn band_polar_measure(m: usize, lo: f64, hi: f64) -> f64 {
    let a = sphere_phi_full(m, lo.clamp(-1.0, 1.0).acos()).unwrap_or(f64::NAN);
    let b = sphere_phi_full(m, hi.clamp(-1.0, 1.0).acos()).unwrap_or(f64::NAN);
    (a - b).max(0.0)
}

/// Measure of `{y ∈ S^{n-2} : s·y_1 ∈ ∪ bands}`.
pub(crate) fn zonal_section(n: usize, bands: &[[f64; 2]], s: f64) -> f64 {
    if n == 2 {
        return bands
            .iter()
            .map(|b| (b[0] <= s && s <= b[1]) as u8 as f64 + (b[0] <= -s && -s <= b[1]) as u8 as f64)
            .sum();
    }
    if s < 1e-300 {
        let inside = bands.iter().any(|b| b[0] <= 0.0 && 0.0 <= b[1]);
        return if inside { sphere_area::<f64>(n - 2) } else { 0.0 };
    }
    let area = sphere_area::<f64>(n - 3);
    bands
        .iter()
        .filter(|b| b[1] >= -s && b[0] <= s)
        .map(|b| area * band_polar_measure(n - 2, b[0] / s, b[1] / s))
        .sum()
}

/// Outcome of the striped-cap construction.
#[derive(Clone, Debug, PartialEq)]
pub struct StripedCap {
    pub base: ConeBase,
    pub strips: usize,
    pub gamma: f64,
    pub pitch: f64,
    /// Largest observed `|A ∩ ξ^⊥| - λ|C ∩ ξ^⊥|` on the scan grid.
    pub max_excess: f64,
}

/// A subset `A` of the cap `C = {⟨x, axis⟩ ≥ alpha}` made of narrow strips,
/// with `|A| = λ|C|` and `|A ∩ ξ^⊥| ≤ λ|C ∩ ξ^⊥| + eps` for all `ξ`.
///
/// The cap is cut into `N` cells of pitch `δ = (1 - α)/N` and the strip
/// `[α + (k - γ)δ, α + kδ]` of each cell is kept; `γ` is fixed by the
/// measure constraint. `N` is doubled until the section excess, scanned on
/// a grid containing every strip edge, is at most `eps / 2`.
pub fn striped_cap_subset(alpha: f64, axis: &Direction, lambda: f64, eps: f64) -> Result<StripedCap> {
    let n = axis.dim();
    if n < 3 {
        return Err(Error::Unsupported("striped caps need n >= 3".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain("alpha", alpha, "need 0 < alpha < 1"));
    }
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::domain("lambda", lambda, "need 0 < lambda <= 1"));
    }
    if !(eps > 0.0) {
        return Err(Error::domain("eps", eps, "need eps > 0"));
    }
    let cap = [[alpha, 1.0]];
    if lambda == 1.0 {
        return Ok(StripedCap {
            base: ConeBase::zonal(axis.clone(), cap.to_vec())?,
            strips: 1,
            gamma: 1.0,
            pitch: 1.0 - alpha,
            max_excess: 0.0,
        });
    }
    let mut strips = 4usize;
    while strips <= 1 << 22 {
        let cap = striped_cap_with_strips(alpha, axis, lambda, strips)?;
        if cap.max_excess <= eps / 2.0 {
            return Ok(cap);
        }
        strips *= 2;
    }
    Err(Error::Solver(format!(
        "no strip pitch meets eps = {eps:e} (eps too small for the float resolution)"
    )))
}

/// The striped subset of `{⟨x, axis⟩ ≥ alpha}` with `strips` cells and
/// `|A| = λ|C|`, with its section excess scanned but not bounded.
pub fn striped_cap_with_strips(alpha: f64, axis: &Direction, lambda: f64, strips: usize) -> Result<StripedCap> {
    let n = axis.dim();
    if n < 3 {
        return Err(Error::Unsupported("striped caps need n >= 3".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain("alpha", alpha, "need 0 < alpha < 1"));
    }
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::domain("lambda", lambda, "need 0 < lambda <= 1"));
    }
    if strips == 0 {
        return Err(Error::domain("strips", 0.0, "need at least one strip"));
    }
    let cap = [[alpha, 1.0]];
    let cap_measure = band_polar_measure(n - 1, alpha, 1.0);
    let pitch = (1.0 - alpha) / strips as f64;
    let bands_for = |gamma: f64| -> Vec<[f64; 2]> {
        (1..=strips)
            .map(|k| {
                let hi = if k == strips { 1.0 } else { alpha + k as f64 * pitch };
                [alpha + (k as f64 - gamma) * pitch, hi]
            })
            .collect()
    };
    let measure_of = |gamma: f64| -> f64 {
        bands_for(gamma)
            .iter()
            .map(|b| band_polar_measure(n - 1, b[0], b[1]))
            .sum()
    };
    let target = lambda * cap_measure;
    let gamma = if lambda == 1.0 {
        1.0
    } else {
        brent(|g| measure_of(g) - target, 0.0, 1.0, 1e-15, 300)?
    };
    let bands = bands_for(gamma);
    let mut grid: Vec<f64> = bands.iter().flat_map(|b| [b[0], b[1]]).collect();
    let uniform = 4000;
    grid.extend((0..=uniform).map(|i| alpha + (1.0 - alpha) * i as f64 / uniform as f64));
    let excess = grid
        .par_iter()
        .map(|&s| zonal_section(n, &bands, s) - lambda * zonal_section(n, &cap, s))
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Ok(StripedCap {
        base: ConeBase::zonal(axis.clone(), bands)?,
        strips,
        gamma,
        pitch,
        max_excess: excess,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e3() -> Direction {
        Direction::axis(3, 2)
    }

    #[test]
    fn cap_measure() {
        let c = ConeBase::cap(e3(), 0.5).unwrap();
        assert!((c.measure(3) - PI).abs() < 1e-14);
        let full = ConeBase::full(4).unwrap();
        assert!((full.measure(4) - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn hemisphere_sections_are_half_circles() {
        let h = ConeBase::cap(e3(), 0.0).unwrap();
        for xi in [[1.0, 0.0, 0.0], [0.6, 0.0, 0.8]] {
            assert!((h.section_measure(&xi) - PI).abs() < 1e-14);
        }
        assert!((h.section_measure(&[0.0, 0.0, 1.0]) - 2.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn cap_section_closed_form() {
        // a great circle at angle β from the axis meets the cap {t ≥ a} in an arc of length 2 arccos(a / sin β)
        let c = ConeBase::cap(e3(), 0.3).unwrap();
        let beta = 1.1f64;
        let xi = [beta.sin(), 0.0, beta.cos()];
        let s = (PI / 2.0 - beta).cos();
        let expected = 2.0 * (0.3 / s).acos();
        assert!((c.section_measure(&xi) - expected).abs() < 1e-13);
    }

    #[test]
    fn arcs_measure_and_sections() {
        let a = ConeBase::arcs(vec![[0.0, 1.0], [2.0, 2.5]]).unwrap();
        assert!((a.measure(2) - 1.5).abs() < 1e-15);
        // ξ = e_2 has ξ^⊥ spanned by e_1: angle 0 is in the first arc, angle π is not
        assert_eq!(a.section_measure(&[0.0, 1.0]), 1.0);
        assert!(ConeBase::arcs(vec![[0.0, 1.0], [0.5, 2.0]]).is_err());
        assert!(ConeBase::arcs(vec![[5.0, 7.0], [0.5, 0.6]]).is_err());
    }

    #[test]
    fn symmetry_and_reflection() {
        let a = ConeBase::arcs(vec![[0.2, 0.9]]).unwrap();
        assert!(!a.is_symmetric());
        assert!(a.with_reflection().unwrap().is_symmetric());
        let z = ConeBase::zonal(e3(), vec![[-0.4, 0.0], [0.4, 1.0]]).unwrap();
        assert!(!z.is_symmetric());
    }

    #[test]
    fn reflected_complement_sections_are_half() {
        let z = ConeBase::zonal(e3(), vec![[-0.4, 0.0], [0.4, 1.0]]).unwrap();
        assert!((z.measure(3) - 2.0 * PI).abs() < 1e-13);
        for beta in [0.1f64, 0.7, 1.3, 1.5] {
            let xi = [beta.sin(), 0.0, beta.cos()];
            assert!((z.section_measure(&xi) - PI).abs() < 1e-12);
        }
    }

    #[test]
    fn striped_cap_meets_measure_and_section_bound() {
        let sc = striped_cap_subset(0.3, &e3(), 0.5, 0.05).unwrap();
        let cap = ConeBase::cap(e3(), 0.3).unwrap();
        assert!((sc.base.measure(3) - 0.5 * cap.measure(3)).abs() < 1e-8);
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let z: f64 = rng.random_range(-1.0..1.0);
            let ph: f64 = rng.random_range(0.0..TAU);
            let r = (1.0 - z * z).sqrt();
            let xi = [r * ph.cos(), r * ph.sin(), z];
            let lhs = sc.base.section_measure(&xi);
            assert!(lhs <= 0.5 * cap.section_measure(&xi) + 0.05);
        }
    }

    #[test]
    fn cap_area_formula() {
        // |C| = |S^{n-2}| ∫_α^1 (1-t²)^{(n-3)/2} dt
        for n in [3usize, 4, 5] {
            let a = 0.35;
            let c = ConeBase::cap(Direction::axis(n, 0), a).unwrap();
            let w = (n as f64 - 3.0) / 2.0;
            let integral = crate::quadrature::integrate_radial(|t: f64| (1.0 - t * t).powf(w), a, 1.0, 1e-13)
                .unwrap()
                .value;
            assert!((c.measure(n) - sphere_area::<f64>(n - 2) * integral).abs() < 1e-11);
        }
    }
}
