use std::num::NonZeroUsize;

use gauss_quad::{FiniteAboveNegOneF64, GaussJacobi};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{pairwise_sum, Real};

/// Node count above which rule construction is refused.
pub const DEFAULT_NODE_CAP: usize = 5_000_000;

/// Surface area `|S^m|` of the unit sphere in `R^{m+1}`.
pub fn sphere_area<T: Real>(m: usize) -> T {
    let two_pi = T::lit(2.0) * T::PI();
    let mut area = if m % 2 == 0 { T::lit(2.0) } else { two_pi };
    let mut k = if m % 2 == 0 { 0 } else { 1 };
    while k < m {
        k += 2;
        area = area * two_pi / T::from_usize_lossy(k - 1);
    }
    area
}

/// Gauss–Jacobi nodes and weights on `[-1, 1]` for the weight `(1-t²)^a`.
pub fn gauss_jacobi_symmetric(q: usize, a: f64) -> Result<Vec<(f64, f64)>> {
    let q = NonZeroUsize::new(q).ok_or_else(|| Error::domain("q", 0.0, "need at least one node"))?;
    let exp = FiniteAboveNegOneF64::new(a).ok_or_else(|| Error::domain("a", a, "Jacobi exponent must exceed -1"))?;
    let rule = GaussJacobi::new(q, exp, exp);
    let mut pairs = rule.as_node_weight_pairs().to_vec();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(pairs)
}

/// Quadrature on the unit sphere `S^m ⊂ R^{m+1}` integrating polynomials up
/// to `exactness` exactly. Nodes are stored row-major.
#[derive(Clone, Debug)]
pub struct SphereRule<T> {
    dim: usize,
    nodes: Vec<T>,
    weights: Vec<T>,
    exactness: usize,
}

impl<T: Real> SphereRule<T> {
    pub fn new(m: usize, degree: usize) -> Result<Self> {
        Self::with_cap(m, degree, DEFAULT_NODE_CAP)
    }

    pub fn with_cap(m: usize, degree: usize, cap: usize) -> Result<Self> {
        if degree < 1 {
            return Err(Error::domain("degree", degree as f64, "need degree >= 1"));
        }
        let count = Self::node_count(m, degree);
        if count > cap {
            return Err(Error::Resource(format!(
                "rule on S^{m} of degree {degree} needs {count} nodes (cap {cap})"
            )));
        }
        Self::build(m, degree)
    }

    fn node_count(m: usize, degree: usize) -> usize {
        match m {
            0 => 2,
            1 => degree + 1,
            _ => (degree / 2 + 1).saturating_mul(Self::node_count(m - 1, degree)),
        }
    }

    fn build(m: usize, degree: usize) -> Result<Self> {
        match m {
            0 => Ok(Self {
                dim: 0,
                nodes: vec![T::one(), -T::one()],
                weights: vec![T::one(), T::one()],
                exactness: usize::MAX,
            }),
            1 => {
                let n = degree + 1;
                let step = T::lit(2.0) * T::PI() / T::from_usize_lossy(n);
                let mut nodes = Vec::with_capacity(2 * n);
                for j in 0..n {
                    let (s, c) = (step * T::from_usize_lossy(j)).sin_cos();
                    nodes.push(c);
                    nodes.push(s);
                }
                Ok(Self {
                    dim: 1,
                    nodes,
                    weights: vec![step; n],
                    exactness: degree,
                })
            }
            _ => {
                let sub = Self::build(m - 1, degree)?;
                let q = degree / 2 + 1;
                let polar = gauss_jacobi_symmetric(q, (m as f64 - 2.0) / 2.0)?;
                let mut nodes = Vec::with_capacity(polar.len() * sub.len() * (m + 1));
                let mut weights = Vec::with_capacity(polar.len() * sub.len());
                for &(t, wt) in &polar {
                    let t = T::lit(t);
                    let wt = T::lit(wt);
                    let s = (T::one() - t * t).max(T::zero()).sqrt();
                    for (y, &wy) in sub.iter() {
                        nodes.extend(y.iter().map(|&yi| s * yi));
                        nodes.push(t);
                        weights.push(wt * wy);
                    }
                }
                Ok(Self {
                    dim: m,
                    nodes,
                    weights,
                    exactness: degree,
                })
            }
        }
    }

    /// Sphere dimension `m` (nodes have `m + 1` components).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn exactness(&self) -> usize {
        self.exactness
    }

    pub fn node(&self, i: usize) -> &[T] {
        let w = self.dim + 1;
        &self.nodes[i * w..(i + 1) * w]
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[T], &T)> {
        self.nodes.chunks_exact(self.dim + 1).zip(self.weights.iter())
    }

    /// `∫_{S^m} f` with node values evaluated in parallel and summed pairwise.
    pub fn integrate<F>(&self, f: F) -> T
    where
        F: Fn(&[T]) -> T + Sync,
    {
        let terms: Vec<T> = self
            .nodes
            .par_chunks_exact(self.dim + 1)
            .zip(self.weights.par_iter())
            .map(|(x, &w)| w * f(x))
            .collect();
        pairwise_sum(&terms)
    }

    /// Sequential variant of [`integrate`](Self::integrate) for nested use.
    pub fn integrate_seq<F>(&self, mut f: F) -> T
    where
        F: FnMut(&[T]) -> T,
    {
        let terms: Vec<T> = self.iter().map(|(x, &w)| w * f(x)).collect();
        pairwise_sum(&terms)
    }
}

/// A rule on the great subsphere `S^{n-1} ∩ ξ^⊥`, realised by embedding a
/// rule on `S^{n-2}` through an orthonormal frame of `ξ^⊥`.
#[derive(Clone, Debug)]
pub struct SubsphereRule<T> {
    direction: Vec<T>,
    frame: Vec<Vec<T>>,
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> SubsphereRule<T> {
    /// The frame is `H e_1, …, H e_{n-1}` where `H` is the Householder
    /// reflection exchanging `e_n` and `ξ`.
    pub fn new(base: &SphereRule<T>, xi: &[T]) -> Result<Self> {
        let n = xi.len();
        if base.dim() + 2 != n {
            return Err(Error::domain(
                "rule.dim",
                base.dim() as f64,
                format!("subsphere of S^{} needs a rule on S^{}", n - 1, n - 2),
            ));
        }
        let frame = householder_frame(xi);
        let mut nodes = Vec::with_capacity(base.len() * n);
        for (y, _) in base.iter() {
            for c in 0..n {
                let mut v = T::zero();
                for (i, e) in frame.iter().enumerate() {
                    v = v + y[i] * e[c];
                }
                nodes.push(v);
            }
        }
        Ok(Self {
            direction: xi.to_vec(),
            frame,
            nodes,
            weights: base.weights().to_vec(),
        })
    }

    pub fn direction(&self) -> &[T] {
        &self.direction
    }

    pub fn frame(&self) -> &[Vec<T>] {
        &self.frame
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[T], &T)> {
        self.nodes.chunks_exact(self.direction.len()).zip(self.weights.iter())
    }

    pub fn integrate<F>(&self, mut f: F) -> T
    where
        F: FnMut(&[T]) -> T,
    {
        let terms: Vec<T> = self.iter().map(|(x, &w)| w * f(x)).collect();
        pairwise_sum(&terms)
    }
}

fn householder_frame<T: Real>(xi: &[T]) -> Vec<Vec<T>> {
    let n = xi.len();
    let mut v: Vec<T> = xi.iter().map(|&x| -x).collect();
    v[n - 1] = v[n - 1] + T::one();
    let vv: T = v.iter().map(|&x| x * x).sum();
    (0..n - 1)
        .map(|i| {
            let mut e = vec![T::zero(); n];
            e[i] = T::one();
            if vv > T::epsilon() * T::epsilon() {
                let scale = T::lit(2.0) * v[i] / vv;
                for (ec, &vc) in e.iter_mut().zip(&v) {
                    *ec = *ec - scale * vc;
                }
            }
            e
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn areas() {
        assert!((sphere_area::<f64>(0) - 2.0).abs() < 1e-15);
        assert!((sphere_area::<f64>(1) - 2.0 * PI).abs() < 1e-15);
        assert!((sphere_area::<f64>(2) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area::<f64>(3) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_area::<f64>(4) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn circle_rule_is_uniform() {
        let r = SphereRule::<f64>::new(1, 7).unwrap();
        assert_eq!(r.len(), 8);
        assert!(r.weights().iter().all(|&w| (w - PI / 4.0).abs() < 1e-15));
    }

    #[test]
    fn weights_sum_to_area() {
        for m in 1..=4 {
            for d in [1, 5, 12, 23] {
                let r = SphereRule::<f64>::new(m, d).unwrap();
                let s: f64 = r.weights().iter().sum();
                assert!((s - sphere_area::<f64>(m)).abs() < 1e-10, "m={m} d={d}");
                assert!(r.weights().iter().all(|&w| w > 0.0));
                for (x, _) in r.iter() {
                    let nrm: f64 = x.iter().map(|v| v * v).sum();
                    assert!((nrm - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn monomials_match_closed_form_on_s2() {
        // ∫_{S²} x⁴ y² = 4π/35 · (3·1)/(…) computed via ∫ x^{2a} y^{2b} z^{2c} = 2Γ(a+½)Γ(b+½)Γ(c+½)/Γ(a+b+c+3/2)
        let r = SphereRule::<f64>::new(2, 11).unwrap();
        let got = r.integrate(|x| x[0].powi(4) * x[1].powi(2) * x[2].powi(4));
        use statrs::function::gamma::gamma;
        let exact = 2.0 * gamma(2.5) * gamma(1.5) * gamma(2.5) / gamma(6.5);
        assert!((got - exact).abs() < 1e-13);
        let odd = r.integrate(|x| x[0].powi(3) * x[2].powi(6));
        assert!(odd.abs() < 1e-13);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            SphereRule::<f64>::with_cap(3, 40, 1000),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn identity_frame_at_pole() {
        let base = SphereRule::<f64>::new(1, 7).unwrap();
        let sub = SubsphereRule::new(&base, &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(sub.frame()[0], vec![1.0, 0.0, 0.0]);
        assert_eq!(sub.frame()[1], vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn embedded_nodes_are_orthogonal() {
        let base = SphereRule::<f64>::new(1, 7).unwrap();
        for xi in [[1.0, 0.0, 0.0], [0.6, 0.0, -0.8], [0.0, 0.0, -1.0]] {
            let sub = SubsphereRule::new(&base, &xi).unwrap();
            for (x, _) in sub.iter() {
                let dot: f64 = x.iter().zip(&xi).map(|(a, b)| a * b).sum();
                let nrm: f64 = x.iter().map(|v| v * v).sum();
                assert!(dot.abs() < 1e-12 && (nrm - 1.0).abs() < 1e-12);
            }
            let total = sub.integrate(|_| 1.0);
            assert!((total - 2.0 * PI).abs() < 1e-12);
        }
    }

    #[test]
    fn single_precision_rule() {
        let r = SphereRule::<f32>::new(2, 9).unwrap();
        let s: f32 = r.weights().iter().sum();
        assert!((s - 4.0 * std::f32::consts::PI).abs() < 1e-4);
    }
}
