use serde::Serialize;

use crate::error::Result;
use crate::functions::BoundaryFunction;
use crate::modal::ModalSeries;

use super::Solution;

/// Relative sample perturbation whose effect on the fitted Legendre
/// coefficients is treated as noise before differentiating.
pub const CHOP_TOLERANCE: f64 = 1e-13;

/// Radii kept for interior residuals.
pub const INTERIOR_BAND: (f64, f64) = (0.05, 0.95);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub tolerance: f64,
    /// Interior sup of Δⁿf − φₙ.
    pub volume: f64,
    /// Entry j: sup over the circle of Δʲf − φⱼ, j = 0…n−1.
    pub traces: Vec<f64>,
    pub passed: bool,
    pub warning: Option<String>,
}

impl ResidualReport {
    pub fn max_residual(&self) -> f64 {
        self.traces.iter().copied().fold(self.volume, f64::max)
    }
}

fn residuals(sol: &Solution, chop: f64) -> Result<(f64, Vec<f64>)> {
    let problem = sol.problem();
    let grid = sol.f.grid().clone();
    let n_t = grid.n_theta();
    let mut series = ModalSeries::fit(&sol.f).chopped(chop);
    let mut traces = Vec::with_capacity(problem.n());
    for j in 0..problem.n() {
        if j > 0 {
            series = series.laplacian();
        }
        let trace = series.to_disk_function()?;
        let target: &BoundaryFunction = problem.boundary(j)?;
        traces.push(trace.boundary_trace().max_abs_diff(&target.resample(n_t)?));
    }
    let top = series.laplacian().to_disk_function()?;
    let volume = problem.volume();
    let mut sup: f64 = 0.0;
    for (i, &r) in grid.radial_nodes().iter().enumerate() {
        if r <= INTERIOR_BAND.0 || r >= INTERIOR_BAND.1 {
            continue;
        }
        for j in 0..n_t {
            sup = sup.max((top.value(i, j) - volume.value(i, j)).norm());
        }
    }
    Ok((sup, traces))
}

/// Differentiates the solution spectrally and compares every trace and the
/// top-order Laplacian against the data.
pub fn verify_solution(sol: &Solution, tol: f64) -> Result<ResidualReport> {
    let (volume, traces) = residuals(sol, CHOP_TOLERANCE)?;
    let (volume_alt, traces_alt) = residuals(sol, 10.0 * CHOP_TOLERANCE)?;
    let drift = traces.iter().zip(&traces_alt).map(|(a, b)| (a - b).abs()).fold((volume - volume_alt).abs(), f64::max);
    let warning = (drift > tol / 10.0).then(|| {
        format!(
            "spectral differentiation is amplifying grid noise (residuals move by {drift:.3e} \
             when the coefficient cutoff changes); use a finer grid"
        )
    });
    let passed = volume < tol && traces.iter().all(|t| *t < tol);
    Ok(ResidualReport { tolerance: tol, volume, traces, passed, warning })
}
