use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functions::BoundaryFunction;
use crate::kernels::NormProfile;
use crate::par::pairwise_sum_real;

/// Boundary values f(e^{iθ}) = e^{iγ(θ)} of a self-map of the disk.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTrace {
    /// Unwrapped angle at the grid nodes, γ(0) ∈ (−π, π].
    pub gamma: Vec<f64>,
    /// Spectral derivative γ′ at the grid nodes.
    pub gamma_prime: Vec<f64>,
}

/// Allowed deviation of |f| from 1 on the circle.
pub const UNIT_MODULUS_TOLERANCE: f64 = 1e-8;

impl BoundaryTrace {
    pub fn from_boundary(values: &BoundaryFunction) -> Result<Self> {
        let n = values.len();
        let samples = values.samples();
        let worst = samples.iter().map(|v| (v.norm() - 1.0).abs()).fold(0.0, f64::max);
        if worst > UNIT_MODULUS_TOLERANCE {
            return Err(Error::BoundaryMap(format!("|f| deviates from 1 by {worst:.3e} on the circle")));
        }
        let mut gamma = Vec::with_capacity(n);
        let mut prev = samples[0].arg();
        gamma.push(prev);
        for v in &samples[1..] {
            let step = (v / Complex64::from_polar(1.0, prev)).arg();
            if step.abs() > 0.5 * PI {
                return Err(Error::BoundaryMap(format!(
                    "angle jumps by {step:.3} between neighbouring samples; refine the circle grid"
                )));
            }
            prev += step;
            gamma.push(prev);
        }
        let closing = (samples[0] / Complex64::from_polar(1.0, prev)).arg();
        let total = prev + closing - gamma[0];
        if (total - 2.0 * PI).abs() > 1e-6 {
            return Err(Error::BoundaryMap(format!("winding number {:.6} is not one", total / (2.0 * PI))));
        }
        // γ(θ) − θ is periodic.
        let periodic = BoundaryFunction::from_samples(
            gamma.iter().enumerate().map(|(j, g)| Complex64::new(g - 2.0 * PI * j as f64 / n as f64, 0.0)).collect(),
        )?;
        let gamma_prime = periodic.derivative().samples().iter().map(|d| 1.0 + d.re).collect();
        Ok(Self { gamma, gamma_prime })
    }

    /// ∫₀^{2π} γ′ dθ by the trapezoid rule.
    pub fn total_turning(&self) -> f64 {
        pairwise_sum_real(&self.gamma_prime) * 2.0 * PI / self.gamma_prime.len() as f64
    }
}

/// Two-sided estimate of the boundary Jacobian at one node:
/// γ′·(chord energy ∓ correction).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JacobianBracket {
    pub theta: f64,
    pub lower: f64,
    pub upper: f64,
}

/// At each node θ: the chord energy (1/2π)∫|F(t) − F(θ)|²/|e^{it} − e^{iθ}|² dt
/// (trapezoid rule; the diagonal value is |F′(θ)|²) times γ′, shifted by
/// ±γ′(‖φ₁‖/2 + Σ_{k≥2} ‖φₖ‖(3/16)^{k−2}/16).
pub fn boundary_jacobian_bracket(values: &BoundaryFunction, norms: &NormProfile) -> Result<Vec<JacobianBracket>> {
    let trace = BoundaryTrace::from_boundary(values)?;
    let n = values.len();
    let derivative = values.derivative();
    let correction = 0.5 * norms.norm(1)? + norms.weighted_sum(2, |k| (3.0f64 / 16.0).powi(k as i32 - 2) / 16.0);
    let samples = values.samples();
    let grid = values.grid();
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let theta = grid.node(j);
        let terms: Vec<f64> = (0..n)
            .map(|i| {
                if i == j {
                    derivative.samples()[j].norm_sqr()
                } else {
                    let chord = Complex64::from_polar(1.0, grid.node(i)) - Complex64::from_polar(1.0, theta);
                    (samples[i] - samples[j]).norm_sqr() / chord.norm_sqr()
                }
            })
            .collect();
        let energy = pairwise_sum_real(&terms) / n as f64;
        let g = trace.gamma_prime[j];
        out.push(JacobianBracket { theta, lower: g * (energy - correction), upper: g * (energy + correction) });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_trace() {
        let b = BoundaryFunction::from_fn(32, |t| Complex64::from_polar(1.0, t)).unwrap();
        let t = BoundaryTrace::from_boundary(&b).unwrap();
        assert!(t.gamma_prime.iter().all(|g| (g - 1.0).abs() < 1e-12));
        assert!((t.total_turning() - 2.0 * PI).abs() < 1e-12);
        let norms = NormProfile::zeros(2).unwrap();
        let br = boundary_jacobian_bracket(&b, &norms).unwrap();
        assert!(br.iter().all(|x| (x.lower - 1.0).abs() < 1e-12 && (x.upper - 1.0).abs() < 1e-12));
    }

    #[test]
    fn degree_two_is_rejected() {
        let b = BoundaryFunction::from_fn(32, |t| Complex64::from_polar(1.0, 2.0 * t)).unwrap();
        assert!(matches!(BoundaryTrace::from_boundary(&b), Err(Error::BoundaryMap(_))));
    }
}
