//! Closed-form mappings with known polyharmonic data.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functions::{BoundaryFunction, DiskFunction};
use crate::quadrature::DiskGrid;
use crate::solver::PolyharmonicProblem;

/// f(z) = z + (|z|² − |z|⁴)/60: biharmonic, 30/29-quasiconformal, with
/// Δf = −1/5 on the circle and Δ²f = −16/15.
pub mod near_identity {
    use super::*;

    pub const K: f64 = 30.0 / 29.0;
    pub const LAPLACIAN_TRACE: f64 = -0.2;
    pub const BILAPLACIAN: f64 = -16.0 / 15.0;

    pub fn f(z: Complex64) -> Complex64 {
        let s = z.norm_sqr();
        z + (s - s * s) / 60.0
    }

    pub fn f_z(z: Complex64) -> Complex64 {
        z.conj() * (1.0 - 2.0 * z.norm_sqr()) / 60.0 + 1.0
    }

    pub fn f_zbar(z: Complex64) -> Complex64 {
        z * (1.0 - 2.0 * z.norm_sqr()) / 60.0
    }
}

pub fn biharmonic_near_identity(grid: &Arc<DiskGrid>) -> Result<PolyharmonicProblem> {
    let n_t = grid.n_theta();
    let volume = DiskFunction::from_fn(grid.clone(), |_| Complex64::new(near_identity::BILAPLACIAN, 0.0))?;
    let b0 = BoundaryFunction::from_modes(n_t, [(1, Complex64::new(1.0, 0.0))])?;
    let b1 = BoundaryFunction::constant(n_t, Complex64::new(near_identity::LAPLACIAN_TRACE, 0.0))?;
    PolyharmonicProblem::new(volume, vec![b0, b1])
}

/// f(z) = β|z|^τ z. Its Laplacians are Δᵏf = β·cₖ·r^{τ+1−2k}e^{iθ} with
/// cₖ = Π_{j<k}((τ+1−2j)² − 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerStretch {
    pub tau: f64,
    pub beta: f64,
    pub n: usize,
}

impl PowerStretch {
    pub fn new(tau: f64, beta: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("order n = {n} must be at least 2")));
        }
        if !(tau > 2.0 * n as f64 - 1.0) {
            return Err(Error::Domain(format!(
                "tau = {tau} must exceed 2n - 1 for the top Laplacian to be continuous at 0"
            )));
        }
        Ok(Self { tau, beta, n })
    }

    /// cₖ.
    pub fn laplacian_factor(&self, k: usize) -> f64 {
        (0..k).map(|j| (self.tau + 1.0 - 2.0 * j as f64).powi(2) - 1.0).product()
    }

    pub fn f(&self, z: Complex64) -> Complex64 {
        self.beta * z.norm().powf(self.tau) * z
    }

    /// Distortion 1 + τ.
    pub fn k(&self) -> f64 {
        1.0 + self.tau
    }

    pub fn f_z(&self, z: Complex64) -> Complex64 {
        Complex64::new(self.beta * (1.0 + self.tau / 2.0) * z.norm().powf(self.tau), 0.0)
    }

    pub fn f_zbar(&self, z: Complex64) -> Complex64 {
        let r = z.norm();
        if r == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        self.beta * self.tau / 2.0 * r.powf(self.tau - 2.0) * z * z
    }

    pub fn problem(&self, grid: &Arc<DiskGrid>) -> Result<PolyharmonicProblem> {
        let n_t = grid.n_theta();
        let boundary = (0..self.n)
            .map(|k| {
                BoundaryFunction::from_modes(n_t, [(1, Complex64::new(self.beta * self.laplacian_factor(k), 0.0))])
            })
            .collect::<Result<Vec<_>>>()?;
        let c = self.beta * self.laplacian_factor(self.n);
        let p = self.tau + 1.0 - 2.0 * self.n as f64;
        let volume = DiskFunction::from_fn(grid.clone(), move |z| {
            let r = z.norm();
            if r == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                c * r.powf(p - 1.0) * z
            }
        })?;
        PolyharmonicProblem::new(volume, boundary)
    }
}

/// f(z) = z log|z|²: Δf = 4/z̄ away from 0, Δ²f = 0 there, and
/// |f(z) − f(0)|/|z| = |log|z|²| is unbounded near 0.
pub mod log_stretch {
    use super::*;

    pub fn f(z: Complex64) -> Complex64 {
        if z == Complex64::new(0.0, 0.0) {
            return z;
        }
        z * z.norm_sqr().ln()
    }

    pub fn laplacian(z: Complex64) -> Complex64 {
        4.0 / z.conj()
    }

    pub fn f_z(z: Complex64) -> Complex64 {
        Complex64::new(z.norm_sqr().ln() + 1.0, 0.0)
    }

    pub fn f_zbar(z: Complex64) -> Complex64 {
        z / z.conj()
    }
}

/// Σ c_{pq} z^p z̄^q: manufactured solutions with exact derivatives.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Polynomial {
    terms: BTreeMap<(u32, u32), Complex64>,
}

impl Polynomial {
    pub fn monomial(p: u32, q: u32, c: Complex64) -> Self {
        let mut out = Self::default();
        out.add_term(p, q, c);
        out
    }

    pub fn add_term(&mut self, p: u32, q: u32, c: Complex64) {
        *self.terms.entry((p, q)).or_default() += c;
    }

    /// Random coefficients in the unit square on every z^p z̄^q with
    /// p + q ≤ `degree`, plus z^m and z̄^m for m ≤ `harmonic_degree`.
    pub fn random(seed: u64, degree: u32, harmonic_degree: u32) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut coeff = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let mut out = Self::default();
        for p in 0..=degree {
            for q in 0..=(degree - p) {
                out.add_term(p, q, coeff());
            }
        }
        for m in (degree + 1)..=harmonic_degree {
            out.add_term(m, 0, coeff());
            out.add_term(0, m, coeff());
        }
        out
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let zb = z.conj();
        self.terms.iter().map(|(&(p, q), c)| c * z.powu(p) * zb.powu(q)).sum()
    }

    /// Δ(z^p z̄^q) = 4pq z^{p−1} z̄^{q−1}.
    pub fn laplacian(&self) -> Self {
        let mut out = Self::default();
        for (&(p, q), c) in &self.terms {
            if p > 0 && q > 0 {
                out.add_term(p - 1, q - 1, c * (4 * p * q) as f64);
            }
        }
        out
    }

    pub fn laplacian_pow(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |acc, _| acc.laplacian())
    }

    pub fn d_z(&self) -> Self {
        let mut out = Self::default();
        for (&(p, q), c) in &self.terms {
            if p > 0 {
                out.add_term(p - 1, q, c * p as f64);
            }
        }
        out
    }

    pub fn d_zbar(&self) -> Self {
        let mut out = Self::default();
        for (&(p, q), c) in &self.terms {
            if q > 0 {
                out.add_term(p, q - 1, c * q as f64);
            }
        }
        out
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(p, q)| p + q).max().unwrap_or(0)
    }

    /// Dirichlet data Δᵏf|_𝕋 (k < n) and Δⁿf on `grid`.
    pub fn problem(&self, n: usize, grid: &Arc<DiskGrid>) -> Result<PolyharmonicProblem> {
        let boundary = (0..n)
            .map(|k| {
                let lap = self.laplacian_pow(k);
                BoundaryFunction::from_fn(grid.n_theta(), move |t| lap.eval(Complex64::from_polar(1.0, t)))
            })
            .collect::<Result<Vec<_>>>()?;
        let top = self.laplacian_pow(n);
        let volume = DiskFunction::from_fn(grid.clone(), move |z| top.eval(z))?;
        PolyharmonicProblem::new(volume, boundary)
    }
}

/// Five-point Laplacian of a closed form.
pub fn stencil_laplacian(f: impl Fn(Complex64) -> Complex64, z: Complex64, h: f64) -> Complex64 {
    let dx = Complex64::new(h, 0.0);
    let dy = Complex64::new(0.0, h);
    (f(z + dx) + f(z - dx) + f(z + dy) + f(z - dy) - 4.0 * f(z)) / (h * h)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogStretchReport {
    /// Max relative deviation of the stencil Laplacian of f from 4/z̄.
    pub laplacian_deviation: f64,
    /// Max |Δ(4/z̄)| by the stencil, relative to |4/z̄|.
    pub bilaplacian_relative: f64,
    /// (|z|, |f(z) − f(0)|/|z|) toward the origin.
    pub quotients: Vec<(f64, f64)>,
}

/// Checks of the log-stretch fixture at `points` (away from 0).
pub fn log_stretch_report(points: &[Complex64]) -> Result<LogStretchReport> {
    let mut lap: f64 = 0.0;
    let mut bilap: f64 = 0.0;
    for &z in points {
        let r = z.norm();
        if !(r > 0.05 && r < 1.0) {
            return Err(Error::Domain(format!("sample point {z} must satisfy 0.05 < |z| < 1")));
        }
        let h = 1e-3 * r;
        let exact = log_stretch::laplacian(z);
        lap = lap.max((stencil_laplacian(log_stretch::f, z, h) - exact).norm() / exact.norm());
        bilap = bilap.max(stencil_laplacian(log_stretch::laplacian, z, h).norm() / exact.norm());
    }
    let quotients = (1..=8)
        .map(|e| {
            let r = 10f64.powi(-e);
            let z = Complex64::new(r, 0.0);
            (r, (log_stretch::f(z) - log_stretch::f(Complex64::new(0.0, 0.0))).norm() / r)
        })
        .collect();
    Ok(LogStretchReport { laplacian_deviation: lap, bilaplacian_relative: bilap, quotients })
}
