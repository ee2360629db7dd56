//! Structured radial representation used for differentiation.
//!
//! The angular mode m of a smooth function on the disk has the form
//! r^{|m|} q(r²). Each profile is fitted by weighted least squares with q a
//! Legendre series in y = 2r² − 1; the polar Laplacian then acts on q as
//! 4(ρ q″ + (|m|+1) q′), an exact map on coefficients, so no division by r
//! is ever performed.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::Result;
use crate::fft;
use crate::functions::{BoundaryFunction, DiskFunction};
use crate::gauss::{gauss_legendre, legendre_table};
use crate::par::map_range;
use crate::quadrature::DiskGrid;

/// Per-|m| least-squares projectors, cached on the grid.
pub(crate) struct ModalBasis {
    projectors: Vec<Projector>,
}

struct Projector {
    n_coeffs: usize,
    /// n_coeffs × n_r, row-major.
    matrix: Vec<f64>,
    /// ℓ¹ norm of each row: the worst-case response of a coefficient to a
    /// unit perturbation of the samples.
    row_norms: Vec<f64>,
}

impl ModalBasis {
    fn build(grid: &DiskGrid) -> Self {
        let n_r = grid.n_r();
        let (_, w) = gauss_legendre(n_r);
        let r = grid.radial_nodes();
        let projectors = map_range(grid.n_theta() / 2 + 1, |m| {
            let n_coeffs = if m + 1 > n_r { 1 } else { (n_r - 1 - m) / 2 + 1 };
            let mut b = DMatrix::<f64>::zeros(n_r, n_coeffs);
            for i in 0..n_r {
                let (p, _, _) = legendre_table(n_coeffs, 2.0 * r[i] * r[i] - 1.0);
                let s = w[i].sqrt() * r[i].powi(m as i32);
                for l in 0..n_coeffs {
                    b[(i, l)] = s * p[l];
                }
            }
            let pinv = b.svd(true, true).pseudo_inverse(1e-14).expect("SVD with vectors");
            let mut matrix = vec![0.0; n_coeffs * n_r];
            for l in 0..n_coeffs {
                for i in 0..n_r {
                    matrix[l * n_r + i] = pinv[(l, i)] * w[i].sqrt();
                }
            }
            let row_norms =
                (0..n_coeffs).map(|l| matrix[l * n_r..(l + 1) * n_r].iter().map(|a| a.abs()).sum()).collect();
            Projector { n_coeffs, matrix, row_norms }
        });
        Self { projectors }
    }

    pub(crate) fn for_grid(grid: &DiskGrid) -> &ModalBasis {
        grid.modal.get_or_init(|| ModalBasis::build(grid))
    }
}

/// Legendre coefficients (in y = 2r² − 1) of the reduced profile q for
/// every FFT slot.
#[derive(Debug, Clone)]
pub struct ModalSeries {
    grid: Arc<DiskGrid>,
    coeffs: Vec<Vec<Complex64>>,
    /// Sup of the fitted samples; `None` once the series is derived.
    amplitude: Option<f64>,
}

fn abs_mode(k: usize, n_t: usize) -> usize {
    fft::signed_mode(k, n_t).unsigned_abs() as usize
}

impl ModalSeries {
    pub fn fit(f: &DiskFunction) -> Self {
        let grid = f.grid().clone();
        let basis = ModalBasis::for_grid(&grid);
        let n_r = grid.n_r();
        let n_t = grid.n_theta();
        let coeffs = map_range(n_t, |k| {
            let proj = &basis.projectors[abs_mode(k, n_t)];
            let prof = f.profile(k);
            (0..proj.n_coeffs)
                .map(|l| proj.matrix[l * n_r..(l + 1) * n_r].iter().zip(prof).map(|(a, b)| b * a).sum())
                .collect()
        });
        Self { grid, coeffs, amplitude: Some(f.sup_norm()) }
    }

    pub fn grid(&self) -> &Arc<DiskGrid> {
        &self.grid
    }

    /// Zeroes every fitted coefficient that sample perturbations of relative
    /// size `rel_tol` could produce. Derived series are returned unchanged.
    pub fn chopped(&self, rel_tol: f64) -> Self {
        let Some(amplitude) = self.amplitude else {
            return self.clone();
        };
        let basis = ModalBasis::for_grid(&self.grid);
        let n_t = self.grid.n_theta();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let norms = &basis.projectors[abs_mode(k, n_t)].row_norms;
                c.iter()
                    .zip(norms)
                    .map(|(v, w)| if v.norm() <= rel_tol * amplitude * w { Complex64::new(0.0, 0.0) } else { *v })
                    .collect()
            })
            .collect();
        Self { grid: self.grid.clone(), coeffs, amplitude: self.amplitude }
    }

    /// Polar Laplacian applied mode by mode.
    pub fn laplacian(&self) -> Self {
        let n_t = self.grid.n_theta();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let m = abs_mode(k, n_t) as f64;
                let d1 = scale_vec(&leg_derivative(c), 2.0);
                let d2 = scale_vec(&leg_derivative(&d1), 2.0);
                let rho_d2 = mul_rho(&d2);
                (0..c.len())
                    .map(|l| {
                        let a = rho_d2.get(l).copied().unwrap_or_default();
                        let b = d1.get(l).copied().unwrap_or_default();
                        4.0 * (a + (m + 1.0) * b)
                    })
                    .collect()
            })
            .collect();
        Self { grid: self.grid.clone(), coeffs, amplitude: None }
    }

    /// Profiles r^{|m|} q(r²) at radius r, per FFT slot.
    pub fn profiles_at(&self, r: f64) -> Vec<Complex64> {
        let n_t = self.grid.n_theta();
        let n_max = self.coeffs.iter().map(|c| c.len()).max().unwrap_or(0);
        let (p, _, _) = legendre_table(n_max, 2.0 * r * r - 1.0);
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let q: Complex64 = c.iter().zip(&p).map(|(a, b)| a * b).sum();
                q * r.powi(abs_mode(k, n_t) as i32)
            })
            .collect()
    }

    /// Synthesizes grid values and the r = 1 trace.
    pub fn to_disk_function(&self) -> Result<DiskFunction> {
        let n_r = self.grid.n_r();
        let n_t = self.grid.n_theta();
        let rows = map_range(n_r, |i| self.profiles_at(self.grid.radial_nodes()[i]));
        let mut modes = vec![Complex64::new(0.0, 0.0); n_r * n_t];
        for (i, row) in rows.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                modes[k * n_r + i] = *v;
            }
        }
        let trace = trace_from_slots(self.profiles_at(1.0))?;
        Ok(DiskFunction::from_modes_with_trace(self.grid.clone(), modes, trace))
    }

    /// Wirtinger derivatives (f_z, f_z̄) as grid functions with r = 1 traces.
    /// The Nyquist slot is not differentiated.
    pub fn wirtinger(&self) -> Result<(DiskFunction, DiskFunction)> {
        let n_r = self.grid.n_r();
        let n_t = self.grid.n_theta();
        let h = (n_t / 2) as i64;
        let n_max = self.coeffs.iter().map(|c| c.len()).max().unwrap_or(0);
        let derivs: Vec<Vec<Complex64>> = self.coeffs.iter().map(|c| scale_vec(&leg_derivative(c), 2.0)).collect();
        let eval_at = |r: f64| -> (Vec<Complex64>, Vec<Complex64>) {
            let rho = r * r;
            let (p, _, _) = legendre_table(n_max, 2.0 * rho - 1.0);
            let mut fz = vec![Complex64::new(0.0, 0.0); n_t];
            let mut fzb = vec![Complex64::new(0.0, 0.0); n_t];
            for k in 0..n_t {
                if 2 * k == n_t {
                    continue;
                }
                let m = fft::signed_mode(k, n_t);
                let ma = m.unsigned_abs() as i32;
                let q: Complex64 = self.coeffs[k].iter().zip(&p).map(|(a, b)| a * b).sum();
                let dq: Complex64 = derivs[k].iter().zip(&p).map(|(a, b)| a * b).sum();
                // a = r^{|m|} q(ρ): f_z gains mode m−1 from ½(a′ + m a/r),
                // f_z̄ gains mode m+1 from ½(a′ − m a/r).
                let (down, up) = if m > 0 {
                    (r.powi(ma - 1) * (m as f64 * q + rho * dq), r.powi(ma + 1) * dq)
                } else if m < 0 {
                    (r.powi(ma + 1) * dq, r.powi(ma - 1) * (ma as f64 * q + rho * dq))
                } else {
                    (r * dq, r * dq)
                };
                if m - 1 >= -h {
                    fz[fft::slot(m - 1, n_t).expect("in range")] += down;
                }
                if m + 1 < h {
                    fzb[fft::slot(m + 1, n_t).expect("in range")] += up;
                }
            }
            (fz, fzb)
        };
        let rows = map_range(n_r, |i| eval_at(self.grid.radial_nodes()[i]));
        let mut fz_modes = vec![Complex64::new(0.0, 0.0); n_r * n_t];
        let mut fzb_modes = vec![Complex64::new(0.0, 0.0); n_r * n_t];
        for (i, (a, b)) in rows.iter().enumerate() {
            for k in 0..n_t {
                fz_modes[k * n_r + i] = a[k];
                fzb_modes[k * n_r + i] = b[k];
            }
        }
        let (ta, tb) = eval_at(1.0);
        let fz = DiskFunction::from_modes_with_trace(self.grid.clone(), fz_modes, trace_from_slots(ta)?);
        let fzb = DiskFunction::from_modes_with_trace(self.grid.clone(), fzb_modes, trace_from_slots(tb)?);
        Ok((fz, fzb))
    }
}

fn trace_from_slots(slots: Vec<Complex64>) -> Result<BoundaryFunction> {
    let n = slots.len();
    BoundaryFunction::from_modes(n, slots.into_iter().enumerate().map(|(k, c)| (fft::signed_mode(k, n), c)))
}

fn scale_vec(c: &[Complex64], s: f64) -> Vec<Complex64> {
    c.iter().map(|v| v * s).collect()
}

/// Legendre coefficients of d/dy of a Legendre series.
fn leg_derivative(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len();
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    // d_l = (2l+1) Σ_{k>l, k−l odd} c_k, accumulated from the top.
    let mut odd = Complex64::new(0.0, 0.0);
    let mut even = Complex64::new(0.0, 0.0);
    for l in (0..n).rev() {
        // Sums over k ≥ l+1 with k ≡ l+1 (mod 2).
        if l + 1 < n {
            if (l + 1) % 2 == 0 {
                even += c[l + 1];
            } else {
                odd += c[l + 1];
            }
        }
        let s = if (l + 1) % 2 == 0 { even } else { odd };
        d[l] = s * (2 * l + 1) as f64;
    }
    d
}

/// Legendre coefficients of ρ·g with ρ = (1 + y)/2.
fn mul_rho(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
    for (l, v) in c.iter().enumerate() {
        out[l] += 0.5 * v;
        // y P_l = ((l+1) P_{l+1} + l P_{l−1}) / (2l+1)
        let lf = l as f64;
        out[l + 1] += 0.5 * v * (lf + 1.0) / (2.0 * lf + 1.0);
        if l > 0 {
            out[l - 1] += 0.5 * v * lf / (2.0 * lf + 1.0);
        }
    }
    out
}
