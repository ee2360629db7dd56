use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Normalized forward transform: c_k = (1/N) Σ_j x_j e^{-2πijk/N}.
pub fn forward(data: &mut [Complex64]) {
    let n = data.len();
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n).process(data));
    let s = 1.0 / n as f64;
    data.iter_mut().for_each(|v| *v *= s);
}

/// Synthesis: x_j = Σ_k c_k e^{2πijk/N}.
pub fn inverse(data: &mut [Complex64]) {
    let n = data.len();
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n).process(data));
}

/// Signed frequency of FFT slot k (Nyquist slot maps to −N/2).
pub fn signed_mode(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// FFT slot of signed frequency m, if representable.
pub fn slot(m: i64, n: usize) -> Option<usize> {
    let h = (n / 2) as i64;
    if m >= -h && m < h {
        Some(m.rem_euclid(n as i64) as usize)
    } else {
        None
    }
}
