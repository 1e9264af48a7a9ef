use serde::{Deserialize, Serialize};

use crate::bodies::{make_ball, make_perturbed_ball};
use crate::error::{Error, Result};
use crate::functionals::{intersection_functional, FunctionalOptions, QuadratureConfig};
use crate::harmonics::radon_multiplier;
use crate::quadrature::sphere_area;
use crate::spaces::{phi, Direction, SpaceSpec};

/// Constants of the second-order expansion of the functional about a ball
/// of radius `r` in `S^n_+`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CChain {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    /// `vol(B ∩ ξ^⊥)`.
    pub section: f64,
}

fn check(n: usize, r: f64) -> Result<SpaceSpec> {
    if n < 3 {
        return Err(Error::domain("n", n as f64, "need n >= 3"));
    }
    if !(r > 0.0 && r < std::f64::consts::FRAC_PI_2) {
        return Err(Error::domain("r", r, "need 0 < r < pi/2"));
    }
    SpaceSpec::hemisphere(n)
}

pub fn c_chain(n: usize, r: f64) -> Result<CChain> {
    let space = check(n, r)?;
    let nf = n as f64;
    let v = sphere_area::<f64>(n - 2) * phi(&space, n - 1, r)?;
    Ok(CChain {
        c0: (nf - 1.0) / (2.0 * r.tan()),
        c1: r.sin().powi(n as i32 - 2),
        c2: (nf - 2.0) / (2.0 * r.tan()),
        c3: nf * v.powi(n as i32 - 1),
        c4: nf * (nf - 1.0) / 2.0 * v.powi(n as i32 - 2),
        section: v,
    })
}

/// `c_5 = |S^{n-2}| vol(B ∩ ξ^⊥) / ((n-1) tan r sin^{n-2} r)`.
pub fn c5_constant(n: usize, r: f64) -> Result<f64> {
    let c = c_chain(n, r)?;
    Ok(sphere_area::<f64>(n - 2) * c.section / ((n as f64 - 1.0) * r.tan() * c.c1))
}

/// One perturbed ball compared with the ball of the same volume.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationResult {
    pub n: usize,
    pub r: f64,
    pub k: usize,
    pub beta: f64,
    pub alpha: f64,
    pub delta_norm: f64,
    pub eps_norm: f64,
    pub lhs_k: f64,
    pub lhs_b: f64,
    /// `lhs_k - lhs_b`.
    pub difference: f64,
    /// Quadrature error bound on `difference`.
    pub difference_error: f64,
    pub conclusive: bool,
    /// `sign(λ_k² - c_5)`.
    pub predicted_sign: i8,
    pub c5: f64,
    pub lambda_k: f64,
    /// `difference / delta_norm²`.
    pub ratio: f64,
    /// `-c_1² c_4 (c_5 - λ_k²)`.
    pub predicted_ratio: f64,
}

/// Outcome of a schedule of decreasing `β`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationExperiment {
    pub rows: Vec<PerturbationResult>,
    /// Index of the row with the smallest conclusive `β`.
    pub decisive: Option<usize>,
}

impl PerturbationExperiment {
    /// Observed sign of `Δ` at the decisive row, if any.
    pub fn observed_sign(&self) -> Option<i8> {
        self.decisive.map(|i| self.rows[i].difference.signum() as i8)
    }

    pub fn sign_matches(&self) -> Option<bool> {
        self.decisive
            .map(|i| self.rows[i].difference.signum() as i8 == self.rows[i].predicted_sign)
    }

    /// `|ratio / predicted_ratio - 1|` at the decisive row.
    pub fn ratio_deviation(&self) -> Option<f64> {
        self.decisive.map(|i| {
            let row = &self.rows[i];
            (row.ratio / row.predicted_ratio - 1.0).abs()
        })
    }
}

/// The default `β` schedule.
pub const DEFAULT_BETAS: [f64; 4] = [0.04, 0.02, 0.01, 0.005];

/// Compares perturbed balls `r + α + βH_k` with the ball of radius `r` in
/// `S^n_+` along a schedule of `β`. A row is conclusive when `|Δ|` exceeds
/// ten times the combined quadrature error estimate.
pub fn perturbation_sign_experiment(
    n: usize,
    r: f64,
    k: usize,
    betas: &[f64],
    quadrature: &QuadratureConfig,
) -> Result<PerturbationExperiment> {
    let space = check(n, r)?;
    let chain = c_chain(n, r)?;
    let c5 = c5_constant(n, r)?;
    let lambda_k = radon_multiplier::<f64>(n, k)?;
    let predicted_sign = if lambda_k * lambda_k > c5 { 1 } else { -1 };
    let predicted_ratio = -chain.c1 * chain.c1 * chain.c4 * (c5 - lambda_k * lambda_k);
    let opts = FunctionalOptions::default().quadrature(*quadrature);
    let ball = make_ball(space, r)?;
    let lhs_b = intersection_functional(&ball, &opts)?;
    let axis = Direction::axis(n, n - 1);
    let mut rows = Vec::with_capacity(betas.len());
    for &beta in betas {
        let p = make_perturbed_ball(r, beta, k, axis.clone())?;
        let lhs_k = intersection_functional(&p.body, &opts)?;
        let difference = lhs_k.value - lhs_b.value;
        let difference_error = lhs_k.error + lhs_b.error + 4.0 * f64::EPSILON * lhs_b.value.abs();
        rows.push(PerturbationResult {
            n,
            r,
            k,
            beta,
            alpha: p.alpha,
            delta_norm: p.delta_norm,
            eps_norm: p.eps_norm,
            lhs_k: lhs_k.value,
            lhs_b: lhs_b.value,
            difference,
            difference_error,
            conclusive: difference.abs() > 10.0 * difference_error,
            predicted_sign,
            c5,
            lambda_k,
            ratio: difference / (p.delta_norm * p.delta_norm),
            predicted_ratio,
        });
    }
    let decisive = rows
        .iter()
        .enumerate()
        .filter(|(_, row)| row.conclusive)
        .min_by(|a, b| a.1.beta.abs().total_cmp(&b.1.beta.abs()))
        .map(|(i, _)| i);
    Ok(PerturbationExperiment { rows, decisive })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    #[test]
    fn c5_closed_form_in_dimension_three() {
        for r in [0.2, FRAC_PI_4, 1.2] {
            let want = 2.0 * PI * PI * (1.0 - f64::cos(r)) / (r.tan() * r.sin());
            assert!((c5_constant(3, r).unwrap() - want).abs() < 1e-12 * want);
        }
        let c = c5_constant(3, FRAC_PI_4).unwrap();
        assert!((c - 8.177).abs() < 1e-3);
        assert!((c / (PI * PI) - 0.8284).abs() < 1e-4);
    }

    #[test]
    fn c5_below_its_limit() {
        for n in 3..=5 {
            let bound = (sphere_area::<f64>(n - 2) / (n as f64 - 1.0)).powi(2);
            for r in [1e-3, 0.3, 0.8, 1.5] {
                assert!(c5_constant(n, r).unwrap() < bound);
            }
            assert!((c5_constant(n, 1e-4).unwrap() / bound - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(c_chain(2, 0.5).is_err());
        assert!(c_chain(3, 1.6).is_err());
    }
}
