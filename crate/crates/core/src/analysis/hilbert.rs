use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::functions::BoundaryFunction;
use crate::quadrature::pv_integrate_hilbert;

/// Sign s in the multiplier m ↦ s·i·sgn(m), read off the principal value
/// integral applied to e^{iθ} at θ = 0.
fn multiplier_sign() -> f64 {
    static SIGN: OnceLock<f64> = OnceLock::new();
    *SIGN.get_or_init(|| {
        let probe = BoundaryFunction::from_modes(16, [(1, Complex64::new(1.0, 0.0))]).expect("valid probe");
        let pv = pv_integrate_hilbert(&probe, 0.0).expect("finite probe");
        pv.im.signum()
    })
}

/// Periodic Hilbert transform as a Fourier multiplier; the mean maps to 0.
pub fn hilbert_transform(psi: &BoundaryFunction) -> BoundaryFunction {
    let s = multiplier_sign();
    psi.map_modes(|m| Complex64::new(0.0, s * m.signum() as f64))
}

/// Boundary data that can be sampled at any even resolution.
pub trait BoundarySource {
    /// Resolution of the first level of a refinement study.
    fn base_resolution(&self) -> usize;
    fn sample(&self, n: usize) -> Result<BoundaryFunction>;
}

impl BoundarySource for BoundaryFunction {
    fn base_resolution(&self) -> usize {
        self.len()
    }

    fn sample(&self, n: usize) -> Result<BoundaryFunction> {
        self.resample(n)
    }
}

/// Σ c_m e^{imθ} with coefficients from a rule, truncated to the Nyquist
/// range of each resolution.
pub struct FourierSeries<F> {
    pub coeff: F,
    pub base: usize,
}

impl<F: Fn(i64) -> Complex64> BoundarySource for FourierSeries<F> {
    fn base_resolution(&self) -> usize {
        self.base
    }

    fn sample(&self, n: usize) -> Result<BoundaryFunction> {
        let h = (n / 2) as i64;
        BoundaryFunction::from_modes(n, (1 - h..h).map(|m| (m, (self.coeff)(m))))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Verdict {
    Bounded,
    UnboundedSuspected,
}

/// Refinement study of sup|H(dφ₀/dθ)|. The verdict is heuristic: growth
/// below 5% over the last doubling reads as bounded.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipschitzReport {
    pub resolutions: Vec<usize>,
    pub sups: Vec<f64>,
    pub last_growth: f64,
    pub verdict: Verdict,
}

pub const GROWTH_THRESHOLD: f64 = 0.05;

const OVERSAMPLING: usize = 4;

pub fn lipschitz_criterion<S: BoundarySource + ?Sized>(phi0: &S, refinement_levels: usize) -> Result<LipschitzReport> {
    let levels = refinement_levels.max(2);
    let mut resolutions = Vec::with_capacity(levels);
    let mut sups = Vec::with_capacity(levels);
    for level in 0..levels {
        let n = phi0.base_resolution() << level;
        let h = hilbert_transform(&phi0.sample(n)?.derivative());
        sups.push(h.resample(OVERSAMPLING * n)?.sup_norm());
        resolutions.push(n);
    }
    let (a, b) = (sups[levels - 2], sups[levels - 1]);
    let last_growth = if a > 0.0 {
        (b - a) / a
    } else if b > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    let verdict = if last_growth < GROWTH_THRESHOLD { Verdict::Bounded } else { Verdict::UnboundedSuspected };
    Ok(LipschitzReport { resolutions, sups, last_growth, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_maps_to_sine() {
        let c = BoundaryFunction::from_fn(16, |t| Complex64::new(t.cos(), 0.0)).unwrap();
        let h = hilbert_transform(&c);
        assert!((h.eval(0.4) - Complex64::new(0.4f64.sin(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn single_mode_is_bounded() {
        let phi = BoundaryFunction::from_modes(16, [(1, Complex64::new(1.0, 0.0))]).unwrap();
        let r = lipschitz_criterion(&phi, 4).unwrap();
        assert_eq!(r.verdict, Verdict::Bounded);
        assert!(r.sups.iter().all(|s| (s - 1.0).abs() < 1e-12));
    }
}
