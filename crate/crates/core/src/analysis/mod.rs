//! Differential and metric analysis of computed mappings.

mod hilbert;
mod pairs;
mod trace;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functions::DiskFunction;
use crate::modal::ModalSeries;
use crate::solver::CHOP_TOLERANCE;

pub use hilbert::{
    hilbert_transform, lipschitz_criterion, BoundarySource, FourierSeries, LipschitzReport, Verdict, GROWTH_THRESHOLD,
};
pub use pairs::{empirical_bilipschitz, Bilipschitz, NEAR_DIAGONAL_SEPARATIONS};
pub use trace::{boundary_jacobian_bracket, BoundaryTrace, JacobianBracket};

/// Default tolerance for the differentiation-instability warning.
pub const DEFAULT_DERIVATIVE_TOLERANCE: f64 = 1e-8;

/// Points whose operator norm is below this fraction of the largest one
/// are excluded from the distortion sup: there both stretches are at the
/// rounding level and their ratio carries no information.
pub const UNRESOLVED_FRACTION: f64 = 1e-8;

/// Below this minimal stretch the distortion is unbounded.
pub const DEGENERATE_STRETCH: f64 = 1e-14;

/// f_z and f_z̄ on a polar grid.
#[derive(Debug, Clone)]
pub struct DerivativeField {
    pub f_z: DiskFunction,
    pub f_zbar: DiskFunction,
    pub warning: Option<String>,
}

impl DerivativeField {
    pub fn len(&self) -> usize {
        self.f_z.values().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid point for flat index i·n_θ + j.
    pub fn point(&self, idx: usize) -> Complex64 {
        let n_t = self.f_z.grid().n_theta();
        self.f_z.grid().point(idx / n_t, idx % n_t)
    }

    /// |f_z| + |f_z̄|.
    pub fn op_norm(&self, idx: usize) -> f64 {
        self.f_z.values()[idx].norm() + self.f_zbar.values()[idx].norm()
    }

    /// ||f_z| − |f_z̄||.
    pub fn min_stretch(&self, idx: usize) -> f64 {
        (self.f_z.values()[idx].norm() - self.f_zbar.values()[idx].norm()).abs()
    }

    /// |f_z|² − |f_z̄|².
    pub fn jacobian(&self, idx: usize) -> f64 {
        self.f_z.values()[idx].norm_sqr() - self.f_zbar.values()[idx].norm_sqr()
    }

    /// Flat indices of every node except those on the outermost ring.
    pub fn interior(&self) -> std::ops::Range<usize> {
        let g = self.f_z.grid();
        0..(g.n_r() - 1) * g.n_theta()
    }

    pub fn max_op_norm(&self) -> f64 {
        self.interior().map(|i| self.op_norm(i)).fold(0.0, f64::max)
    }

    /// Radial index range of the innermost ring.
    pub fn innermost(&self) -> std::ops::Range<usize> {
        0..self.f_z.grid().n_theta()
    }
}

pub fn wirtinger(f: &DiskFunction) -> Result<DerivativeField> {
    wirtinger_with_tolerance(f, DEFAULT_DERIVATIVE_TOLERANCE)
}

/// Spectral Wirtinger derivatives. A warning is attached when changing the
/// coefficient cutoff moves the result by more than `tol`/10.
pub fn wirtinger_with_tolerance(f: &DiskFunction, tol: f64) -> Result<DerivativeField> {
    let fit = ModalSeries::fit(f);
    let (f_z, f_zbar) = fit.chopped(CHOP_TOLERANCE).wirtinger()?;
    let (alt_z, alt_zbar) = fit.chopped(10.0 * CHOP_TOLERANCE).wirtinger()?;
    let drift = f_z.max_abs_diff(&alt_z)?.max(f_zbar.max_abs_diff(&alt_zbar)?);
    let warning = (drift > tol / 10.0)
        .then(|| format!("derivatives move by {drift:.3e} when the coefficient cutoff changes; use a finer grid"));
    Ok(DerivativeField { f_z, f_zbar, warning })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Distortion {
    pub k_hat: f64,
    pub argmax: Complex64,
    /// Interior nodes skipped as unresolved (see [`UNRESOLVED_FRACTION`]).
    pub unresolved: usize,
}

/// Sup of ‖D_f‖/λ(D_f) over the interior grid.
pub fn distortion(df: &DerivativeField) -> Result<Distortion> {
    let floor = UNRESOLVED_FRACTION * df.max_op_norm();
    let mut best = Distortion { k_hat: 1.0, argmax: Complex64::new(0.0, 0.0), unresolved: 0 };
    let mut found = false;
    for idx in df.interior() {
        let op = df.op_norm(idx);
        if op <= floor {
            best.unresolved += 1;
            continue;
        }
        let at = df.point(idx);
        let jac = df.jacobian(idx);
        if jac <= 0.0 {
            return Err(Error::NotSensePreserving { at, jacobian: jac });
        }
        let lambda = df.min_stretch(idx);
        if lambda < DEGENERATE_STRETCH {
            return Err(Error::Degenerate { at, min_stretch: lambda });
        }
        let ratio = op / lambda;
        if !found || ratio > best.k_hat {
            best.k_hat = ratio.max(1.0);
            best.argmax = at;
            found = true;
        }
    }
    Ok(best)
}

/// Smallest K′ ≥ 0 with ‖D_f‖² ≤ K·J_f + K′ on the interior grid.
pub fn defect(df: &DerivativeField, k: f64) -> f64 {
    df.interior().map(|i| df.op_norm(i).powi(2) - k * df.jacobian(i)).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistortionReport {
    pub k_hat: f64,
    pub argmax: Complex64,
    pub unresolved: usize,
    /// K used for the defect.
    pub k: f64,
    pub kprime_hat: f64,
    pub lipschitz_lower_hat: f64,
    pub lipschitz_upper_hat: f64,
    pub n_pairs: usize,
    pub seed: u64,
}

/// Distortion, defect at `k` (K_hat when `None`) and empirical bi-Lipschitz
/// extremes.
pub fn distortion_report(
    f: &DiskFunction,
    df: &DerivativeField,
    k: Option<f64>,
    n_pairs: usize,
    seed: u64,
) -> Result<DistortionReport> {
    let d = distortion(df)?;
    let k = k.unwrap_or(d.k_hat);
    let lip = empirical_bilipschitz(f, n_pairs, seed)?;
    Ok(DistortionReport {
        k_hat: d.k_hat,
        argmax: d.argmax,
        unresolved: d.unresolved,
        k,
        kprime_hat: defect(df, k),
        lipschitz_lower_hat: lip.lower,
        lipschitz_upper_hat: lip.upper,
        n_pairs,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::DiskGrid;

    #[test]
    fn constant_coefficient_field() {
        let grid = DiskGrid::shared(12, 16).unwrap();
        let f = DiskFunction::from_fn(grid, |z| z + 0.1 * z.conj() + Complex64::new(0.05, 0.0)).unwrap();
        let df = wirtinger(&f).unwrap();
        assert!((defect(&df, 1.0) - 0.22).abs() < 1e-12);
        let d = distortion(&df).unwrap();
        assert!((d.k_hat - 1.1 / 0.9).abs() < 1e-12);
        assert!(defect(&df, d.k_hat) < 1e-10);
    }

    #[test]
    fn orientation_reversal_is_reported() {
        let grid = DiskGrid::shared(12, 16).unwrap();
        let f = DiskFunction::from_fn(grid, |z| z.conj()).unwrap();
        let df = wirtinger(&f).unwrap();
        assert!(matches!(distortion(&df), Err(Error::NotSensePreserving { .. })));
    }
}
