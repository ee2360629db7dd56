//! Sampled functions on the circle and on the disk.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::par::map_range;
use crate::quadrature::{CircleGrid, DiskGrid};

/// A 2π-periodic function given by equispaced samples and the matching
/// discrete Fourier coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFunction {
    samples: Vec<Complex64>,
    coeffs: Vec<Complex64>,
}

impl BoundaryFunction {
    pub fn from_samples(samples: Vec<Complex64>) -> Result<Self> {
        CircleGrid::new(samples.len())?;
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("boundary samples"));
        }
        let mut coeffs = samples.clone();
        fft::forward(&mut coeffs);
        Ok(Self { samples, coeffs })
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let grid = CircleGrid::new(n)?;
        Self::from_samples(grid.nodes().into_iter().map(f).collect())
    }

    /// Trigonometric polynomial Σ c_m e^{imθ} sampled on n points.
    /// Frequencies ±n/2 share the Nyquist slot.
    pub fn from_modes(n: usize, modes: impl IntoIterator<Item = (i64, Complex64)>) -> Result<Self> {
        CircleGrid::new(n)?;
        let h = (n / 2) as i64;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        for (m, c) in modes {
            if m.abs() > h {
                return Err(Error::Domain(format!("mode {m} exceeds the Nyquist limit {h}")));
            }
            if !c.is_finite() {
                return Err(Error::NonFinite("Fourier coefficient"));
            }
            coeffs[m.rem_euclid(n as i64) as usize] += c;
        }
        Ok(Self::from_coeffs(coeffs))
    }

    fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        let mut samples = coeffs.clone();
        fft::inverse(&mut samples);
        Self { samples, coeffs }
    }

    pub fn constant(n: usize, c: Complex64) -> Result<Self> {
        Self::from_modes(n, [(0, c)])
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::constant(n, Complex64::new(0.0, 0.0))
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn grid(&self) -> CircleGrid {
        CircleGrid::new(self.len()).expect("validated on construction")
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Coefficients in FFT order.
    pub fn raw_coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of e^{imθ}; the Nyquist slot is split evenly between ±n/2.
    pub fn coeff(&self, m: i64) -> Complex64 {
        let n = self.len();
        let h = (n / 2) as i64;
        if m.abs() > h {
            Complex64::new(0.0, 0.0)
        } else if m.abs() == h {
            0.5 * self.coeffs[n / 2]
        } else {
            self.coeffs[m.rem_euclid(n as i64) as usize]
        }
    }

    /// All (m, c_m) for −n/2 ≤ m ≤ n/2 with the Nyquist split.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let h = (self.len() / 2) as i64;
        (-h..=h).map(move |m| (m, self.coeff(m)))
    }

    pub fn mean(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Trigonometric interpolant at an arbitrary angle.
    pub fn eval(&self, theta: f64) -> Complex64 {
        self.modes()
            .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
            .map(|(m, c)| c * Complex64::from_polar(1.0, m as f64 * theta))
            .sum()
    }

    /// Spectral derivative in θ (the Nyquist slot is dropped).
    pub fn derivative(&self) -> Self {
        let n = self.len();
        let coeffs = (0..n)
            .map(|k| {
                if 2 * k == n {
                    Complex64::new(0.0, 0.0)
                } else {
                    self.coeffs[k] * Complex64::new(0.0, fft::signed_mode(k, n) as f64)
                }
            })
            .collect();
        Self::from_coeffs(coeffs)
    }

    /// Same trigonometric interpolant sampled on `n` points (zero-padding or
    /// truncation in frequency).
    pub fn resample(&self, n: usize) -> Result<Self> {
        CircleGrid::new(n)?;
        let h = (n / 2) as i64;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        for (m, c) in self.modes() {
            if m.abs() <= h {
                coeffs[m.rem_euclid(n as i64) as usize] += c;
            }
        }
        Ok(Self::from_coeffs(coeffs))
    }

    /// Applies a multiplier to each (signed) mode; the Nyquist slot is
    /// treated as the average of the multiplier at ±n/2.
    pub fn map_modes(&self, multiplier: impl Fn(i64) -> Complex64) -> Self {
        let n = self.len();
        let h = (n / 2) as i64;
        let coeffs = (0..n)
            .map(|k| {
                if 2 * k == n {
                    self.coeffs[k] * 0.5 * (multiplier(h) + multiplier(-h))
                } else {
                    self.coeffs[k] * multiplier(fft::signed_mode(k, n))
                }
            })
            .collect();
        Self::from_coeffs(coeffs)
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self {
            samples: self.samples.iter().map(|v| v * a).collect(),
            coeffs: self.coeffs.iter().map(|v| v * a).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::GridMismatch(format!(
                "boundary functions with {} and {} samples",
                self.len(),
                other.len()
            )));
        }
        Ok(Self {
            samples: self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    /// Max |sample|.
    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.samples.iter().zip(&other.samples).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// A function on the closed disk sampled on a polar [`DiskGrid`], with its
/// angular Fourier profiles and its boundary trace.
#[derive(Debug, Clone)]
pub struct DiskFunction {
    grid: Arc<DiskGrid>,
    values: Vec<Complex64>,
    modes: Vec<Complex64>,
    trace: BoundaryFunction,
}

impl DiskFunction {
    /// From values in radius-major order (index i·n_theta + j); the trace is
    /// extrapolated from the radial profiles.
    pub fn from_values(grid: Arc<DiskGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a {}x{} grid",
                values.len(),
                grid.n_r(),
                grid.n_theta()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("disk values"));
        }
        let (n_r, n_t) = (grid.n_r(), grid.n_theta());
        let rings: Vec<Vec<Complex64>> = map_range(n_r, |i| {
            let mut ring = values[i * n_t..(i + 1) * n_t].to_vec();
            fft::forward(&mut ring);
            ring
        });
        let mut modes = vec![Complex64::new(0.0, 0.0); n_r * n_t];
        for (i, ring) in rings.iter().enumerate() {
            for (k, c) in ring.iter().enumerate() {
                modes[k * n_r + i] = *c;
            }
        }
        let trace = extrapolate_trace(&grid, &modes);
        Ok(Self { grid, values, modes, trace })
    }

    /// From radial profiles in mode-major order (index k·n_r + i, k the FFT
    /// slot).
    pub fn from_modes(grid: Arc<DiskGrid>, modes: Vec<Complex64>) -> Result<Self> {
        if modes.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} mode values for a {}x{} grid",
                modes.len(),
                grid.n_r(),
                grid.n_theta()
            )));
        }
        if modes.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("radial profiles"));
        }
        let trace = extrapolate_trace(&grid, &modes);
        Ok(Self::from_modes_with_trace(grid, modes, trace))
    }

    pub(crate) fn from_modes_with_trace(grid: Arc<DiskGrid>, modes: Vec<Complex64>, trace: BoundaryFunction) -> Self {
        let (n_r, n_t) = (grid.n_r(), grid.n_theta());
        let rings: Vec<Vec<Complex64>> = map_range(n_r, |i| {
            let mut ring: Vec<Complex64> = (0..n_t).map(|k| modes[k * n_r + i]).collect();
            fft::inverse(&mut ring);
            ring
        });
        let values = rings.concat();
        Self { grid, values, modes, trace }
    }

    /// Samples `f` on the grid and on the unit circle.
    pub fn from_fn<F>(grid: Arc<DiskGrid>, f: F) -> Result<Self>
    where
        F: Fn(Complex64) -> Complex64 + Sync + Send,
    {
        let n_t = grid.n_theta();
        let values = map_range(grid.len(), |idx| f(grid.point(idx / n_t, idx % n_t)));
        let trace = BoundaryFunction::from_fn(n_t, |t| f(Complex64::from_polar(1.0, t)))?;
        let mut out = Self::from_values(grid, values)?;
        out.trace = trace;
        Ok(out)
    }

    pub fn zero(grid: Arc<DiskGrid>) -> Result<Self> {
        let n = grid.len();
        Self::from_values(grid, vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn grid(&self) -> &Arc<DiskGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.grid.n_theta() + j]
    }

    /// Radial profile in FFT slot k.
    pub fn profile(&self, k: usize) -> &[Complex64] {
        let n_r = self.grid.n_r();
        &self.modes[k * n_r..(k + 1) * n_r]
    }

    pub fn boundary_trace(&self) -> &BoundaryFunction {
        &self.trace
    }

    pub(crate) fn with_trace(mut self, trace: BoundaryFunction) -> Self {
        self.trace = trace;
        self
    }

    /// Trace obtained by extrapolating the radial profiles to r = 1.
    pub fn extrapolated_trace(&self) -> BoundaryFunction {
        extrapolate_trace(&self.grid, &self.modes)
    }

    /// Value at an arbitrary point of the closed disk (barycentric
    /// interpolation in r, Fourier synthesis in θ).
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let n_r = self.grid.n_r();
        let mut basis = vec![0.0; n_r];
        self.grid.radial_basis(z.norm(), &mut basis);
        let theta = z.arg();
        let n_t = self.grid.n_theta();
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n_t {
            let prof = self.profile(k);
            let a: Complex64 = prof.iter().zip(&basis).map(|(p, b)| p * b).sum();
            if 2 * k == n_t {
                acc += a * (n_t as f64 / 2.0 * theta).cos();
            } else {
                acc += a * Complex64::from_polar(1.0, fft::signed_mode(k, n_t) as f64 * theta);
            }
        }
        acc
    }

    /// Interpolation plan keeping only the modes that carry content above
    /// `rel_floor` times the largest profile.
    pub(crate) fn active_modes(&self, rel_floor: f64) -> Vec<usize> {
        let n_t = self.grid.n_theta();
        let peaks: Vec<f64> = (0..n_t).map(|k| self.profile(k).iter().map(|v| v.norm()).fold(0.0, f64::max)).collect();
        let top = peaks.iter().cloned().fold(0.0, f64::max);
        (0..n_t).filter(|&k| peaks[k] > rel_floor * top && peaks[k] > 0.0).collect()
    }

    pub(crate) fn eval_modes(&self, z: Complex64, active: &[usize], basis: &mut [f64]) -> Complex64 {
        self.grid.radial_basis(z.norm(), basis);
        let theta = z.arg();
        let n_t = self.grid.n_theta();
        active
            .iter()
            .map(|&k| {
                let a: Complex64 = self.profile(k).iter().zip(basis.iter()).map(|(p, b)| p * b).sum();
                if 2 * k == n_t {
                    a * (n_t as f64 / 2.0 * theta).cos()
                } else {
                    a * Complex64::from_polar(1.0, fft::signed_mode(k, n_t) as f64 * theta)
                }
            })
            .sum()
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if *self.grid != *other.grid {
            return Err(Error::GridMismatch(format!(
                "{}x{} vs {}x{}",
                self.grid.n_r(),
                self.grid.n_theta(),
                other.grid.n_r(),
                other.grid.n_theta()
            )));
        }
        Ok(())
    }

    /// a·self + b·other.
    pub fn lin_comb(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        self.check_same_grid(other)?;
        let comb = |x: &[Complex64], y: &[Complex64]| -> Vec<Complex64> {
            x.iter().zip(y).map(|(x, y)| a * x + b * y).collect()
        };
        Ok(Self {
            grid: self.grid.clone(),
            values: comb(&self.values, &other.values),
            modes: comb(&self.modes, &other.modes),
            trace: self.trace.scale(a).add(&other.trace.scale(b))?,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.lin_comb(Complex64::new(1.0, 0.0), other, Complex64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.lin_comb(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * a).collect(),
            modes: self.modes.iter().map(|v| v * a).collect(),
            trace: self.trace.scale(a),
        }
    }

    /// Sup over grid values and the boundary trace.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(self.trace.sup_norm(), f64::max)
    }

    /// Max pointwise difference on the grid.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// Max deviation from a closed form on the grid.
    pub fn max_error_against(&self, exact: impl Fn(Complex64) -> Complex64) -> f64 {
        let n_t = self.grid.n_theta();
        self.values
            .iter()
            .enumerate()
            .map(|(idx, v)| (v - exact(self.grid.point(idx / n_t, idx % n_t))).norm())
            .fold(0.0, f64::max)
    }
}

fn extrapolate_trace(grid: &DiskGrid, modes: &[Complex64]) -> BoundaryFunction {
    let n_r = grid.n_r();
    let edge = grid.edge_basis();
    let coeffs: Vec<Complex64> =
        (0..grid.n_theta()).map(|k| modes[k * n_r..(k + 1) * n_r].iter().zip(edge).map(|(a, b)| a * b).sum()).collect();
    BoundaryFunction::from_coeffs(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn samples_and_coefficients_agree() {
        let f = BoundaryFunction::from_fn(32, |t| c(t.cos(), (3.0 * t).sin())).unwrap();
        assert!((f.coeff(1) - c(0.5, 0.0)).norm() < 1e-15);
        assert!((f.coeff(3) - c(0.5, 0.0)).norm() < 1e-15);
        assert!((f.coeff(-3) - c(-0.5, 0.0)).norm() < 1e-15);
        let g = BoundaryFunction::from_modes(32, f.modes()).unwrap();
        assert!(g.max_abs_diff(&f) < 1e-14);
        assert!((f.eval(0.3) - c(0.3f64.cos(), 0.9f64.sin())).norm() < 1e-14);
    }

    #[test]
    fn resampling_preserves_the_interpolant() {
        let f = BoundaryFunction::from_modes(16, [(2, c(1.0, 2.0)), (-5, c(0.5, 0.0)), (8, c(0.25, 0.0))]).unwrap();
        let up = f.resample(64).unwrap();
        for t in [0.0, 0.4, 2.0] {
            assert!((f.eval(t) - up.eval(t)).norm() < 1e-13);
        }
        let back = up.resample(16).unwrap();
        assert!(back.max_abs_diff(&f) < 1e-14);
    }

    #[test]
    fn derivative_of_trig_polynomial() {
        let f = BoundaryFunction::from_fn(16, |t| c((2.0 * t).sin(), 0.0)).unwrap();
        let d = f.derivative();
        assert!((d.eval(0.7) - c(2.0 * 1.4f64.cos(), 0.0)).norm() < 1e-13);
    }

    #[test]
    fn disk_function_round_trip_and_trace() {
        let grid = DiskGrid::shared(12, 16).unwrap();
        let f = |z: Complex64| z * z + z.conj() * z.norm_sqr() + c(0.5, 0.0);
        let df = DiskFunction::from_fn(grid.clone(), f).unwrap();
        let rebuilt = DiskFunction::from_modes(grid.clone(), df.modes.clone()).unwrap();
        assert!(rebuilt.max_abs_diff(&df).unwrap() < 1e-13);
        assert!(df.extrapolated_trace().max_abs_diff(df.boundary_trace()) < 1e-12);
        let z = Complex64::from_polar(0.37, 2.0 * PI / 7.0);
        assert!((df.eval(z) - f(z)).norm() < 1e-13);
        assert!((df.eval(c(1.0, 0.0)) - f(c(1.0, 0.0))).norm() < 1e-12);
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let a = DiskFunction::zero(DiskGrid::shared(8, 16).unwrap()).unwrap();
        let b = DiskFunction::zero(DiskGrid::shared(8, 32).unwrap()).unwrap();
        assert!(a.add(&b).is_err());
    }
}
