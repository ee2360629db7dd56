use num_complex::Complex64;

use crate::fft;
use crate::functions::{BoundaryFunction, DiskFunction};
use crate::gauss::{gauss_legendre_on, lagrange_basis};
use crate::par::map_range;
use crate::quadrature::DiskGrid;

/// Per-|m| radial matrices of the Green potential on the grid's radial
/// nodes: V[g]_m(r_i) = Σ_j A_m[i][j] ĝ_m(r_j).
pub(crate) struct VolumeOperator {
    n_r: usize,
    /// Index (m·n_r + i)·n_r + j.
    matrices: Vec<f64>,
}

impl VolumeOperator {
    pub(crate) fn for_grid(grid: &DiskGrid) -> &VolumeOperator {
        grid.volume.get_or_init(|| VolumeOperator::build(grid))
    }

    fn build(grid: &DiskGrid) -> Self {
        let n_r = grid.n_r();
        let n_m = grid.n_theta() / 2 + 1;
        let r = grid.radial_nodes();
        let rows: Vec<Vec<f64>> = map_range(n_r, |i| row_block(grid, r[i], n_m));
        let mut matrices = vec![0.0; n_m * n_r * n_r];
        for (i, block) in rows.iter().enumerate() {
            for m in 0..n_m {
                let dst = (m * n_r + i) * n_r;
                matrices[dst..dst + n_r].copy_from_slice(&block[m * n_r..(m + 1) * n_r]);
            }
        }
        Self { n_r, matrices }
    }

    fn matrix_row(&self, m: usize, i: usize) -> &[f64] {
        let start = (m * self.n_r + i) * self.n_r;
        &self.matrices[start..start + self.n_r]
    }

    /// Applies the potential; the result vanishes on the circle.
    pub(crate) fn apply(&self, g: &DiskFunction) -> DiskFunction {
        let grid = g.grid().clone();
        let (n_r, n_t) = (grid.n_r(), grid.n_theta());
        let profiles: Vec<Vec<Complex64>> = map_range(n_t, |k| {
            let m = fft::signed_mode(k, n_t).unsigned_abs() as usize;
            let src = g.profile(k);
            (0..n_r).map(|i| self.matrix_row(m, i).iter().zip(src).map(|(a, b)| b * a).sum()).collect()
        });
        let trace = BoundaryFunction::zero(n_t).expect("grid angular count is valid");
        DiskFunction::from_modes_with_trace(grid, profiles.concat(), trace)
    }
}

/// Rows i of A_m for all m, laid out m-major.
fn row_block(grid: &DiskGrid, r: f64, n_m: usize) -> Vec<f64> {
    let n_r = grid.n_r();
    let mut out = vec![0.0; n_m * n_r];
    let mut basis = vec![0.0; n_r];
    let mut kernel = vec![0.0; n_m];

    let mut accumulate = |s: f64, w: f64, kernel: &[f64], basis: &mut [f64]| {
        lagrange_basis(grid.gauss_x(), grid.bary(), 2.0 * s - 1.0, basis);
        for (m, k) in kernel.iter().enumerate() {
            let c = w * s * k;
            if c == 0.0 {
                continue;
            }
            for (o, b) in out[m * n_r..(m + 1) * n_r].iter_mut().zip(basis.iter()) {
                *o += c * b;
            }
        }
    };

    let (xs, ws) = gauss_legendre_on(n_r + 16, 0.0, r);
    for (&s, &w) in xs.iter().zip(&ws) {
        radial_kernel(s, r, &mut kernel);
        accumulate(s, w, &kernel, &mut basis);
    }

    let mut edges = vec![r];
    let mut e = r;
    while 2.0 * e < 1.0 {
        e *= 2.0;
        edges.push(e);
    }
    edges.push(1.0);
    for panel in edges.windows(2) {
        let (xs, ws) = gauss_legendre_on(n_r / 2 + 16, panel[0], panel[1]);
        for (&s, &w) in xs.iter().zip(&ws) {
            radial_kernel(r, s, &mut kernel);
            accumulate(s, w, &kernel, &mut basis);
        }
    }
    out
}

/// Radial Green kernels for r_< = lo, r_> = hi, all |m| < out.len():
/// −log r_> for m = 0 and ((r_</r_>)^m − (r_< r_>)^m)/(2m) otherwise.
fn radial_kernel(lo: f64, hi: f64, out: &mut [f64]) {
    out[0] = -hi.ln();
    let a = lo / hi;
    let b = lo * hi;
    let (mut am, mut bm) = (1.0, 1.0);
    for (m, o) in out.iter_mut().enumerate().skip(1) {
        am *= a;
        bm *= b;
        *o = if am == 0.0 { 0.0 } else { (am - bm) / (2.0 * m as f64) };
    }
}
