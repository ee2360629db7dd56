//! Polyharmonic Dirichlet problems on the disk: f = P[φ₀] + Σₖ (−1)ᵏ Gₖ[φₖ]
//! with Gₖ the k-fold Green potential.

mod verify;
mod volume;

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fft;
use crate::functions::{BoundaryFunction, DiskFunction};
use crate::kernels::{check_open_disk, green_unchecked, poisson_unchecked, NormProfile};
use crate::par::{map_range, pairwise_sum};
use crate::quadrature::{integrate_disk, DiskGrid, Integral};

pub use verify::{verify_solution, ResidualReport, CHOP_TOLERANCE, INTERIOR_BAND};
pub(crate) use volume::VolumeOperator;

/// Δⁿf = φₙ in the disk with Δᵏf = φₖ on the circle for k < n.
#[derive(Debug, Clone)]
pub struct PolyharmonicProblem {
    n: usize,
    volume: DiskFunction,
    boundary: Vec<BoundaryFunction>,
}

impl PolyharmonicProblem {
    /// `boundary[k]` is the trace of Δᵏf, k = 0…n−1; `volume` is Δⁿf.
    pub fn new(volume: DiskFunction, boundary: Vec<BoundaryFunction>) -> Result<Self> {
        let n = boundary.len();
        if n < 2 {
            return Err(Error::Domain(format!("the order must be at least 2, got {n}")));
        }
        Ok(Self { n, volume, boundary })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn grid(&self) -> &Arc<DiskGrid> {
        self.volume.grid()
    }

    pub fn volume(&self) -> &DiskFunction {
        &self.volume
    }

    pub fn boundary(&self, k: usize) -> Result<&BoundaryFunction> {
        self.boundary.get(k).ok_or(Error::Index { index: k, lo: 0, hi: self.n - 1 })
    }

    /// ‖φₖ‖∞ for k = 1…n.
    pub fn norm_profile(&self) -> NormProfile {
        let mut norms: Vec<f64> = self.boundary[1..].iter().map(|b| b.sup_norm()).collect();
        norms.push(self.volume.sup_norm());
        NormProfile::new(norms).expect("sup norms are finite and nonnegative")
    }

    /// Same problem with every datum multiplied by `a`.
    pub fn scaled(&self, a: Complex64) -> Self {
        Self { n: self.n, volume: self.volume.scale(a), boundary: self.boundary.iter().map(|b| b.scale(a)).collect() }
    }
}

/// Source of a Green chain: boundary data (extended harmonically first) or
/// volume data.
#[derive(Debug, Clone, Copy)]
pub enum Datum<'a> {
    Boundary(&'a BoundaryFunction),
    Volume(&'a DiskFunction),
}

/// Sup of one chain term against its a priori bound
/// (1/4)(3/16)^{k−1}‖φₖ‖∞.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComponentCheck {
    pub k: usize,
    pub sup: f64,
    pub bound: f64,
    pub within: bool,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub f: DiskFunction,
    pub harmonic: DiskFunction,
    /// Entry k−1 holds Gₖ[φₖ] (without the sign).
    pub components: Vec<DiskFunction>,
    pub component_checks: Vec<ComponentCheck>,
    problem: PolyharmonicProblem,
}

impl Solution {
    pub fn problem(&self) -> &PolyharmonicProblem {
        &self.problem
    }

    /// Max deviation of f from P[φ₀] + Σ(−1)ᵏGₖ on the grid.
    pub fn bookkeeping_error(&self) -> f64 {
        let mut acc = self.harmonic.clone();
        for (idx, c) in self.components.iter().enumerate() {
            let sign = if idx % 2 == 0 { -1.0 } else { 1.0 };
            acc = acc.lin_comb(Complex64::new(1.0, 0.0), c, Complex64::new(sign, 0.0)).expect("same grid");
        }
        acc.max_abs_diff(&self.f).expect("same grid")
    }

    pub fn components_within_bounds(&self) -> bool {
        self.component_checks.iter().all(|c| c.within)
    }
}

/// P[φ] on the grid, mode by mode: c_m r^{|m|}. The trace is φ itself.
pub fn harmonic_extension(phi: &BoundaryFunction, grid: &Arc<DiskGrid>) -> Result<DiskFunction> {
    let n_t = grid.n_theta();
    let phi = phi.resample(n_t)?;
    let n_r = grid.n_r();
    let coeffs = phi.raw_coeffs();
    let profiles = map_range(n_t, |k| {
        let m = fft::signed_mode(k, n_t).unsigned_abs() as i32;
        grid.radial_nodes().iter().map(|r| coeffs[k] * r.powi(m)).collect::<Vec<_>>()
    });
    let modes = profiles.concat();
    debug_assert_eq!(modes.len(), n_r * n_t);
    Ok(DiskFunction::from_modes_with_trace(grid.clone(), modes, phi))
}

/// P[φ] by direct trapezoid quadrature of the Poisson integral at every
/// grid point, with enough nodes that the quadrature error at the
/// outermost radius is below `eps`.
pub fn harmonic_extension_quadrature(phi: &BoundaryFunction, grid: &Arc<DiskGrid>, eps: f64) -> Result<DiskFunction> {
    let r_max = *grid.radial_nodes().last().expect("grid has radial nodes");
    let needed = (eps.ln() / r_max.ln()).ceil().max(phi.len() as f64);
    let m = (needed as usize).next_power_of_two().clamp(4, 1 << 20);
    let fine = phi.resample(m)?;
    let dt = 2.0 * std::f64::consts::PI / m as f64;
    let n_t = grid.n_theta();
    let values = map_range(grid.len(), |idx| {
        let z = grid.point(idx / n_t, idx % n_t);
        let terms: Vec<Complex64> =
            fine.samples().iter().enumerate().map(|(j, v)| v * poisson_unchecked(z, dt * j as f64)).collect();
        pairwise_sum(&terms) * dt
    });
    Ok(DiskFunction::from_values(grid.clone(), values)?.with_trace(phi.resample(n_t)?))
}

/// V[g](z) = ∫ G(z,ζ) g(ζ) dσ(ζ). Satisfies ΔV[g] = −g and vanishes on the
/// circle.
pub fn volume_potential(g: &DiskFunction) -> DiskFunction {
    VolumeOperator::for_grid(g.grid()).apply(g)
}

/// V[g](z) at a single point by singular disk quadrature of the defining
/// integral, with g interpolated from its grid values.
pub fn volume_potential_at(g: &DiskFunction, z: Complex64) -> Result<Integral> {
    check_open_disk(z)?;
    let active = g.active_modes(1e-15);
    let n_r = g.grid().n_r();
    integrate_disk(
        |zeta| {
            if zeta == z {
                return Complex64::new(0.0, 0.0);
            }
            let mut basis = vec![0.0; n_r];
            green_unchecked(z, zeta) * g.eval_modes(zeta, &active, &mut basis)
        },
        g.grid(),
        Some(z),
    )
}

/// Gₖ applied to a datum: Vᵏ∘P for boundary data, Vᵏ for volume data.
pub fn green_chain(k: usize, datum: Datum<'_>, grid: &Arc<DiskGrid>) -> Result<DiskFunction> {
    if k == 0 {
        return Err(Error::Index { index: 0, lo: 1, hi: usize::MAX });
    }
    let mut acc = match datum {
        Datum::Boundary(phi) => harmonic_extension(phi, grid)?,
        Datum::Volume(g) => {
            if **g.grid() != **grid {
                return Err(Error::GridMismatch(format!(
                    "volume datum on {}x{}, requested {}x{}",
                    g.grid().n_r(),
                    g.grid().n_theta(),
                    grid.n_r(),
                    grid.n_theta()
                )));
            }
            g.clone()
        }
    };
    for _ in 0..k {
        acc = volume_potential(&acc);
    }
    Ok(acc)
}

pub fn solve(problem: &PolyharmonicProblem) -> Result<Solution> {
    let grid = problem.grid().clone();
    let n = problem.n();
    let harmonic = harmonic_extension(problem.boundary(0)?, &grid)?;
    let mut components = Vec::with_capacity(n);
    for k in 1..n {
        components.push(green_chain(k, Datum::Boundary(problem.boundary(k)?), &grid)?);
    }
    components.push(green_chain(n, Datum::Volume(problem.volume()), &grid)?);

    let mut f = harmonic.clone();
    for (idx, c) in components.iter().enumerate() {
        let sign = if idx % 2 == 0 { -1.0 } else { 1.0 };
        f = f.lin_comb(Complex64::new(1.0, 0.0), c, Complex64::new(sign, 0.0))?;
    }

    let norms = problem.norm_profile();
    let component_checks = components
        .iter()
        .enumerate()
        .map(|(idx, c)| {
            let k = idx + 1;
            let bound = 0.25 * (3.0f64 / 16.0).powi(idx as i32) * norms.norms()[idx];
            let sup = c.sup_norm();
            ComponentCheck { k, sup, bound, within: sup <= bound * (1.0 + 1e-9) + 1e-14 }
        })
        .collect();

    Ok(Solution { f, harmonic, components, component_checks, problem: problem.clone() })
}
