//! Quadrature on the circle and the disk, including the Möbius-pullback
//! scheme for integrands singular at an interior point and the principal
//! value integral defining the periodic Hilbert transform.

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functions::BoundaryFunction;
use crate::gauss::{barycentric_weights, gauss_legendre, gauss_legendre_on, lagrange_basis};
use crate::kernels::check_open_disk;
use crate::modal::ModalBasis;
use crate::par::{map_range, pairwise_sum};
use crate::solver::VolumeOperator;

/// A quadrature value with its two-level error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Integral {
    pub value: Complex64,
    pub error: f64,
}

/// Equispaced nodes t_j = 2πj/n with trapezoid weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CircleGrid {
    n_nodes: usize,
}

impl CircleGrid {
    pub fn new(n_nodes: usize) -> Result<Self> {
        if n_nodes < 4 || n_nodes % 2 != 0 {
            return Err(Error::InvalidGrid(format!("circle grid needs an even node count >= 4, got {n_nodes}")));
        }
        Ok(Self { n_nodes })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn node(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_nodes as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_nodes).map(|j| self.node(j)).collect()
    }

    pub fn weight(&self) -> f64 {
        2.0 * PI / self.n_nodes as f64
    }
}

/// Polar tensor grid: Gauss–Legendre radii in (0,1) times equispaced angles.
pub struct DiskGrid {
    n_r: usize,
    n_theta: usize,
    gauss_x: Vec<f64>,
    radial_nodes: Vec<f64>,
    radial_weights: Vec<f64>,
    bary: Vec<f64>,
    edge_basis: Vec<f64>,
    pub(crate) volume: OnceLock<VolumeOperator>,
    pub(crate) modal: OnceLock<ModalBasis>,
}

impl fmt::Debug for DiskGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiskGrid").field("n_r", &self.n_r).field("n_theta", &self.n_theta).finish()
    }
}

impl PartialEq for DiskGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n_r == other.n_r && self.n_theta == other.n_theta
    }
}

impl DiskGrid {
    pub fn new(n_r: usize, n_theta: usize) -> Result<Self> {
        if n_r < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 radial nodes, got {n_r}")));
        }
        CircleGrid::new(n_theta)?;
        let (x, w) = gauss_legendre(n_r);
        let radial_nodes: Vec<f64> = x.iter().map(|t| 0.5 * (t + 1.0)).collect();
        let radial_weights = w.iter().zip(&radial_nodes).map(|(w, r)| 0.5 * w * r).collect();
        let bary = barycentric_weights(&x, &w);
        let mut edge_basis = vec![0.0; n_r];
        lagrange_basis(&x, &bary, 1.0, &mut edge_basis);
        Ok(Self {
            n_r,
            n_theta,
            gauss_x: x,
            radial_nodes,
            radial_weights,
            bary,
            edge_basis,
            volume: OnceLock::new(),
            modal: OnceLock::new(),
        })
    }

    pub fn shared(n_r: usize, n_theta: usize) -> Result<Arc<Self>> {
        Self::new(n_r, n_theta).map(Arc::new)
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn len(&self) -> usize {
        self.n_r * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn radial_nodes(&self) -> &[f64] {
        &self.radial_nodes
    }

    /// Gauss weights on (0,1) multiplied by r.
    pub fn radial_weights(&self) -> &[f64] {
        &self.radial_weights
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_theta as f64
    }

    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        Complex64::from_polar(self.radial_nodes[i], self.theta(j))
    }

    pub fn circle(&self) -> CircleGrid {
        CircleGrid { n_nodes: self.n_theta }
    }

    pub(crate) fn gauss_x(&self) -> &[f64] {
        &self.gauss_x
    }

    pub(crate) fn bary(&self) -> &[f64] {
        &self.bary
    }

    /// Lagrange basis of the radial nodes evaluated at r = 1.
    pub(crate) fn edge_basis(&self) -> &[f64] {
        &self.edge_basis
    }

    /// Lagrange basis of the radial nodes at radius r.
    pub(crate) fn radial_basis(&self, r: f64, out: &mut [f64]) {
        lagrange_basis(&self.gauss_x, &self.bary, 2.0 * r - 1.0, out);
    }
}

/// Trapezoid rule for a callable periodic integrand.
pub fn integrate_circle<F>(f: F, grid: &CircleGrid) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let samples: Vec<Complex64> = grid.nodes().into_iter().map(f).collect();
    integrate_circle_samples(&samples, grid)
}

/// Trapezoid rule for samples at the nodes of `grid`.
pub fn integrate_circle_samples(samples: &[Complex64], grid: &CircleGrid) -> Result<Complex64> {
    if samples.len() != grid.n_nodes() {
        return Err(Error::GridMismatch(format!("{} samples on a {}-node circle grid", samples.len(), grid.n_nodes())));
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("circle integrand"));
    }
    Ok(pairwise_sum(samples) * grid.weight())
}

/// Geometric radial grading toward the singular point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grading {
    pub levels: usize,
    pub ratio: f64,
    pub nodes_per_panel: usize,
}

impl Grading {
    /// Default grading for a grid with `n_r` radial nodes: six levels of
    /// ratio 1/2, n_r/2 Gauss nodes per panel.
    pub fn for_radial_count(n_r: usize) -> Self {
        Self { levels: 6, ratio: 0.5, nodes_per_panel: (n_r / 2).max(4) }
    }

    fn refined(self) -> Self {
        Self { levels: self.levels + 2, ratio: self.ratio, nodes_per_panel: 2 * self.nodes_per_panel }
    }

    /// Nodes and weights (including the factor ρ) on (0,1).
    fn rule(&self) -> (Vec<f64>, Vec<f64>) {
        let mut edges = vec![0.0];
        for l in (1..=self.levels).rev() {
            edges.push(self.ratio.powi(l as i32));
        }
        edges.push(1.0);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for e in edges.windows(2) {
            let (x, w) = gauss_legendre_on(self.nodes_per_panel, e[0], e[1]);
            for (x, w) in x.into_iter().zip(w) {
                nodes.push(x);
                weights.push(w * x);
            }
        }
        (nodes, weights)
    }
}

/// Polar rule on the disk: radii with ρ-weighted weights, n_theta angles.
struct PolarRule {
    radii: Vec<f64>,
    weights: Vec<f64>,
    n_theta: usize,
}

impl PolarRule {
    fn tensor(n_r: usize, n_theta: usize) -> Self {
        let (x, w) = gauss_legendre_on(n_r, 0.0, 1.0);
        let weights = x.iter().zip(&w).map(|(x, w)| x * w).collect();
        Self { radii: x, weights, n_theta }
    }

    fn evaluate<F>(&self, f: &F, center: Option<Complex64>) -> Result<Complex64>
    where
        F: Fn(Complex64) -> Complex64 + Sync,
    {
        let dt = 2.0 * PI / self.n_theta as f64;
        let rows: Vec<Result<Complex64>> = map_range(self.radii.len(), |i| {
            let rho = self.radii[i];
            let row: Vec<Complex64> = (0..self.n_theta)
                .map(|j| {
                    let w = Complex64::from_polar(rho, dt * j as f64);
                    match center {
                        None => f(w),
                        Some(a) => {
                            let d = Complex64::new(1.0, 0.0) - a.conj() * w;
                            let zeta = (a - w) / d;
                            let s = 1.0 - a.norm_sqr();
                            f(zeta) * (s * s / d.norm_sqr().powi(2))
                        }
                    }
                })
                .collect();
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("disk integrand"));
            }
            Ok(pairwise_sum(&row) * (self.weights[i] * dt))
        });
        let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
        Ok(pairwise_sum(&rows))
    }
}

/// Relative two-level difference above which an integral is declared
/// unresolved.
const DIVERGENCE_THRESHOLD: f64 = 0.1;

/// Integral over the disk with a two-level error estimate. With
/// `singular_at`, the integrand is pulled back through the Möbius map
/// centered there and integrated on a radially graded grid.
pub fn integrate_disk<F>(f: F, grid: &DiskGrid, singular_at: Option<Complex64>) -> Result<Integral>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let coarse = integrate_disk_level(&f, grid.n_r(), grid.n_theta(), singular_at, false)?;
    let fine = integrate_disk_level(&f, grid.n_r(), grid.n_theta(), singular_at, true)?;
    let error = (fine - coarse).norm();
    let scale = fine.norm().max(coarse.norm());
    if error > DIVERGENCE_THRESHOLD * scale && error > 1e-12 {
        return Err(Error::NonConvergence {
            what: "disk quadrature",
            detail: format!(
                "refinement moved the value from {coarse} to {fine}; the integrand is not resolved \
                 (non-integrable singularity or too coarse a grid)"
            ),
        });
    }
    Ok(Integral { value: fine, error })
}

/// Single-level version of [`integrate_disk`], for nested integrals.
pub fn integrate_disk_once<F>(f: F, grid: &DiskGrid, singular_at: Option<Complex64>) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    integrate_disk_level(&f, grid.n_r(), grid.n_theta(), singular_at, false)
}

fn integrate_disk_level<F>(
    f: &F,
    n_r: usize,
    n_theta: usize,
    singular_at: Option<Complex64>,
    refine: bool,
) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let factor = if refine { 2 } else { 1 };
    match singular_at {
        None => PolarRule::tensor(n_r * factor, n_theta * factor).evaluate(f, None),
        Some(a) => {
            check_open_disk(a)?;
            let mut grading = Grading::for_radial_count(n_r);
            if refine {
                grading = grading.refined();
            }
            let (radii, weights) = grading.rule();
            PolarRule { radii, weights, n_theta: n_theta * factor }.evaluate(f, Some(a))
        }
    }
}

/// (1/2π)∫₀^{2π}|1 − e^{it}|^p dt for p > −1, by Gauss–Legendre after the
/// substitution t = π s^q, q = 4/(p+1), which leaves a smooth integrand.
pub fn chordal_power_quadrature(p: f64, nodes: usize) -> Result<Integral> {
    if !(p > -1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("exponent {p} is not integrable against dt")));
    }
    let q = 4.0 / (p + 1.0);
    let level = |n: usize| -> Result<f64> {
        let (s, w) = gauss_legendre_on(n, 0.0, 1.0);
        let terms: Vec<f64> = s
            .iter()
            .zip(&w)
            .map(|(&s, &w)| {
                let t = PI * s.powf(q);
                let smooth = if t == 0.0 { 1.0 } else { (2.0 * (0.5 * t).sin() / t).powf(p) };
                w * q * s.powi(3) * smooth
            })
            .collect();
        if terms.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("chordal power integrand"));
        }
        Ok(PI.powf(p) * crate::par::pairwise_sum_real(&terms))
    };
    let coarse = level(nodes)?;
    let fine = level(2 * nodes)?;
    Ok(Integral { value: Complex64::new(fine, 0.0), error: (fine - coarse).abs() })
}

/// −(1/π)∫₀^π [Ψ(θ+t) − Ψ(θ−t)]/(2 tan(t/2)) dt.
///
/// The integrand is even and 2π-periodic in t, so the full-circle trapezoid
/// rule applies; its t = 0 value is 2Ψ′(θ) and its t = π value is 0.
pub fn pv_integrate_hilbert(psi: &BoundaryFunction, theta: f64) -> Result<Complex64> {
    let m = 2 * psi.len();
    let derivative = psi.derivative().eval(theta);
    if !derivative.is_finite() {
        return Err(Error::NonFinite("principal value integrand near t = 0"));
    }
    let samples: Vec<Complex64> = (0..m)
        .map(|j| {
            if j == 0 {
                return 2.0 * derivative;
            }
            if 2 * j == m {
                return Complex64::new(0.0, 0.0);
            }
            let t = 2.0 * PI * j as f64 / m as f64;
            (psi.eval(theta + t) - psi.eval(theta - t)) / (2.0 * (0.5 * t).tan())
        })
        .collect();
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("principal value integrand"));
    }
    Ok(-pairwise_sum(&samples) / m as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_grid_validation() {
        assert!(CircleGrid::new(3).is_err());
        assert!(CircleGrid::new(6).is_ok());
        let g = CircleGrid::new(8).unwrap();
        assert!(g.nodes().windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn circle_trapezoid() {
        let g = CircleGrid::new(16).unwrap();
        let one = integrate_circle(|_| Complex64::new(1.0, 0.0), &g).unwrap();
        assert!((one.re - 2.0 * PI).abs() < 1e-14);
        let c2 = integrate_circle(|t| Complex64::new(t.cos().powi(2), 0.0), &g).unwrap();
        assert!((c2.re - PI).abs() < 1e-12);
        assert!(integrate_circle(|_| Complex64::new(f64::NAN, 0.0), &g).is_err());
    }

    #[test]
    fn disk_grid_area() {
        let g = DiskGrid::new(64, 256).unwrap();
        let s: f64 = g.radial_weights().iter().sum::<f64>() * 2.0 * PI;
        assert!((s - PI).abs() < 1e-12);
        assert!(g.radial_nodes().iter().all(|&r| r > 0.0 && r < 1.0));
    }

    #[test]
    fn disk_area_and_polynomials() {
        let g = DiskGrid::new(16, 32).unwrap();
        let a = integrate_disk(|_| Complex64::new(1.0, 0.0), &g, None).unwrap();
        assert!((a.value.re - PI).abs() < 1e-12);
        // ∫ |ζ|⁴ dσ = π/3
        let b = integrate_disk(|z| Complex64::new(z.norm_sqr().powi(2), 0.0), &g, None).unwrap();
        assert!((b.value.re - PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn singular_pullback_preserves_area() {
        let g = DiskGrid::new(16, 128).unwrap();
        for a in [Complex64::new(0.0, 0.0), Complex64::new(0.5, -0.3)] {
            let v = integrate_disk(|_| Complex64::new(1.0, 0.0), &g, Some(a)).unwrap();
            assert!((v.value.re - PI).abs() < 1e-10, "{a}: {}", v.value);
        }
    }

    #[test]
    fn divergent_singularity_is_reported() {
        let g = DiskGrid::new(16, 64).unwrap();
        let a = Complex64::new(0.2, 0.1);
        let r = integrate_disk(|z| Complex64::new(1.0 / (z - a).norm_sqr(), 0.0), &g, Some(a));
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn chordal_quadrature_matches_integer_cases() {
        let two = chordal_power_quadrature(2.0, 64).unwrap();
        assert!((two.value.re - 2.0).abs() < 1e-13);
        let zero = chordal_power_quadrature(0.0, 64).unwrap();
        assert!((zero.value.re - 1.0).abs() < 1e-14);
    }
}
