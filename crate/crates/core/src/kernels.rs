//! Green function and Poisson kernel of the unit disk, with the closed-form
//! integrals and bound functions built on them.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::ln_gamma;

/// Default coincidence guard, measured in the Möbius variable |w|.
pub const COINCIDENCE_EPS: f64 = 1e-11;

/// Default cap on series terms for [`power_integral`].
pub const POWER_SERIES_MAX_TERMS: usize = 100_000;

pub(crate) fn check_open_disk(z: Complex64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite point {z}")));
    }
    if z.norm_sqr() >= 1.0 {
        return Err(Error::OutsideDisk { point: z });
    }
    Ok(())
}

/// Sup norms of the data: entry k-1 holds the norm of the k-th datum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormProfile {
    norms: Vec<f64>,
}

impl NormProfile {
    pub fn new(norms: Vec<f64>) -> Result<Self> {
        if norms.len() < 2 {
            return Err(Error::Domain(format!("norm profile needs n >= 2 entries, got {}", norms.len())));
        }
        if let Some(bad) = norms.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::Domain(format!("norm {bad} is not a finite nonnegative real")));
        }
        Ok(Self { norms })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n])
    }

    pub fn n(&self) -> usize {
        self.norms.len()
    }

    /// Norm of the k-th datum, k in 1..=n.
    pub fn norm(&self, k: usize) -> Result<f64> {
        if k == 0 || k > self.norms.len() {
            return Err(Error::Index { index: k, lo: 1, hi: self.norms.len() });
        }
        Ok(self.norms[k - 1])
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { norms: self.norms.iter().map(|v| v * s).collect() }
    }

    /// Σ_{k=from}^{n} c(k)·‖φ_k‖.
    pub(crate) fn weighted_sum(&self, from: usize, c: impl Fn(usize) -> f64) -> f64 {
        (from..=self.n()).map(|k| c(k) * self.norms[k - 1]).sum()
    }
}

/// G(z, ζ) with the default coincidence guard.
pub fn green(z: Complex64, zeta: Complex64) -> Result<f64> {
    green_with_epsilon(z, zeta, COINCIDENCE_EPS)
}

pub fn green_with_epsilon(z: Complex64, zeta: Complex64, epsilon: f64) -> Result<f64> {
    check_open_disk(z)?;
    check_open_disk(zeta)?;
    let w = mobius_distance(z, zeta);
    if w < epsilon {
        return Err(Error::CoincidentPoints { distance: w, epsilon });
    }
    Ok(green_unchecked(z, zeta))
}

/// |(z − ζ)/(1 − z̄ζ)|
pub fn mobius_distance(z: Complex64, zeta: Complex64) -> f64 {
    (z - zeta).norm() / (Complex64::new(1.0, 0.0) - z.conj() * zeta).norm()
}

pub(crate) fn green_unchecked(z: Complex64, zeta: Complex64) -> f64 {
    let num = (Complex64::new(1.0, 0.0) - z * zeta.conj()).norm();
    let den = (z - zeta).norm();
    (num / den).ln() / (2.0 * PI)
}

/// P(z, e^{it}), normalized to unit mass over t in [0, 2π].
pub fn poisson(z: Complex64, t: f64) -> Result<f64> {
    check_open_disk(z)?;
    Ok(poisson_unchecked(z, t))
}

pub(crate) fn poisson_unchecked(z: Complex64, t: f64) -> f64 {
    let d = Complex64::new(1.0, 0.0) - z * Complex64::from_polar(1.0, -t);
    (1.0 - z.norm_sqr()) / (2.0 * PI * d.norm_sqr())
}

/// Σ_k (Γ(k+α)/(k!Γ(α)))² |z|^{2k}, the mean of |1 − z e^{iθ}|^{-2α} over
/// the circle.
pub fn power_integral(z: Complex64, alpha: f64, tol: f64) -> Result<f64> {
    power_integral_with_budget(z, alpha, tol, POWER_SERIES_MAX_TERMS)
}

pub fn power_integral_with_budget(z: Complex64, alpha: f64, tol: f64, max_terms: usize) -> Result<f64> {
    check_open_disk(z)?;
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("exponent alpha = {alpha} must be positive")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance {tol} must be positive")));
    }
    let x = z.norm_sqr();
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    for k in 0..max_terms {
        let kf = k as f64;
        let step = (kf + alpha) / (kf + 1.0);
        let ratio = step * step * x;
        term *= ratio;
        sum += term;
        // Remaining term ratios are bounded by max(ratio, |z|²) from here on.
        let rho = ratio.max(x);
        if rho < 1.0 && term * rho / (1.0 - rho) < tol {
            return Ok(sum);
        }
        if term == 0.0 {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence {
        what: "power series",
        detail: format!("{max_terms} terms at |z| = {} did not reach tolerance {tol:e}", x.sqrt()),
    })
}

/// (1/2π)∫|1 − e^{it}|^{2β} dt = Γ(2β+1)/Γ(β+1)² for β > −1/2.
pub fn chordal_power_mean(beta: f64) -> Result<f64> {
    if !(beta > -0.5) {
        return Err(Error::Domain(format!("chordal exponent 2β = {} is not integrable", 2.0 * beta)));
    }
    if beta == 0.0 {
        return Ok(1.0);
    }
    Ok((ln_gamma(2.0 * beta + 1.0) - 2.0 * ln_gamma(beta + 1.0)).exp())
}

/// (1/2π)∫|e^{it} − 1|^{2K−2} dt, equal to 2^{2K−2}Γ(K−½)/(√π Γ(K)).
pub fn chordal_moment(k: f64) -> Result<f64> {
    if !(k >= 1.0) || !k.is_finite() {
        return Err(Error::Domain(format!("distortion K = {k} must be at least 1")));
    }
    if k == 1.0 {
        return Ok(1.0);
    }
    let log = (2.0 * k - 2.0) * std::f64::consts::LN_2 + ln_gamma(k - 0.5) - ln_gamma(k) - 0.5 * PI.ln();
    Ok(log.exp())
}

/// Closed forms of ∫|G(z,ζ)| dσ and ∫(1−|ζ|²)|G(z,ζ)| dσ.
pub fn green_moments(z: Complex64) -> Result<(f64, f64)> {
    check_open_disk(z)?;
    let s = 1.0 - z.norm_sqr();
    Ok((s / 4.0, s * (2.0 + s) / 16.0))
}

/// Where a derivative bound is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Location {
    Interior(Complex64),
    Boundary,
}

/// Bound on ‖D G_k[φ_k]‖ in the interior or on the circle.
pub fn derivative_bounds(k: usize, profile: &NormProfile, at: Location) -> Result<f64> {
    let norm = profile.norm(k)?;
    let decay = |k: usize| (3.0_f64 / 16.0).powi(k as i32 - 2);
    match at {
        Location::Interior(z) => {
            check_open_disk(z)?;
            if k == 1 {
                Ok(norm / 3.0)
            } else {
                Ok(norm * decay(k) * (2.0 - z.norm_sqr()) / 30.0)
            }
        }
        Location::Boundary => {
            if k == 1 {
                Ok(norm / 4.0)
            } else {
                Ok(norm * decay(k) / 32.0)
            }
        }
    }
}

/// (1/4)(3/16)^{k−1}(1−|z|²), a bound for the k-fold iterated |G| integral.
pub fn iterated_green_bound(k: usize, z: Complex64) -> Result<f64> {
    if k == 0 {
        return Err(Error::Index { index: 0, lo: 1, hi: usize::MAX });
    }
    check_open_disk(z)?;
    Ok(0.25 * (3.0_f64 / 16.0).powi(k as i32 - 1) * (1.0 - z.norm_sqr()))
}

/// 4(2−|z|²)/15, a bound for (1/2π)∫(1−|ς|²)²/(|1−zς̄||z−ς|) dσ, attained at 0.
pub fn weighted_singular_bound(z: Complex64) -> Result<f64> {
    check_open_disk(z)?;
    Ok(4.0 * (2.0 - z.norm_sqr()) / 15.0)
}

/// ∫ P(ζ, e^{iθ})(1−|ζ|²) dσ(ζ), the same for every θ.
pub fn poisson_moment() -> f64 {
    0.25
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn green_at_center() {
        let g = green(c(0.5, 0.0), c(0.0, 0.0)).unwrap();
        assert!((g - 2f64.ln() / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn green_guards() {
        assert!(matches!(green(c(0.3, 0.0), c(0.3 + 1e-12, 0.0)), Err(Error::CoincidentPoints { .. })));
        assert!(matches!(green(c(1.0, 0.0), c(0.0, 0.0)), Err(Error::OutsideDisk { .. })));
    }

    #[test]
    fn poisson_values() {
        assert!((poisson(c(0.0, 0.0), 1.3).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-16);
        assert!((poisson(c(0.5, 0.0), 0.0).unwrap() - 3.0 / (2.0 * PI)).abs() < 1e-15);
        assert!(poisson(c(0.0, 1.0), 0.0).is_err());
    }

    #[test]
    fn power_integral_simple_cases() {
        assert_eq!(power_integral(c(0.0, 0.0), 3.0, 1e-14).unwrap(), 1.0);
        let v = power_integral(c(0.5, 0.0), 1.0, 1e-15).unwrap();
        assert!((v - 4.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn power_integral_budget() {
        let r = power_integral_with_budget(c(0.999, 0.0), 2.0, 1e-12, 50);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn chordal_moment_values() {
        assert_eq!(chordal_moment(1.0).unwrap(), 1.0);
        assert!((chordal_moment(2.0).unwrap() - 2.0).abs() < 1e-13);
        // K = 3: (1/2π)∫(2 − 2cos t)² dt = 6.
        assert!((chordal_moment(3.0).unwrap() - 6.0).abs() < 1e-12);
        assert!(chordal_moment(0.9).is_err());
        for &k in &[1.2, 1.5, 2.7] {
            let a = chordal_moment(k).unwrap();
            let b = chordal_power_mean(k - 1.0).unwrap();
            assert!((a - b).abs() < 1e-13 * a);
        }
    }

    #[test]
    fn moments_and_bounds() {
        assert_eq!(green_moments(c(0.0, 0.0)).unwrap(), (0.25, 3.0 / 16.0));
        let (a, b) = green_moments(c(0.5, 0.0)).unwrap();
        assert!((a - 0.1875).abs() < 1e-16 && (b - 0.12890625).abs() < 1e-16);
        let p = NormProfile::new(vec![3.0, 30.0]).unwrap();
        assert!((derivative_bounds(1, &p, Location::Interior(c(0.2, 0.1))).unwrap() - 1.0).abs() < 1e-15);
        assert!((derivative_bounds(2, &p, Location::Interior(c(0.0, 0.0))).unwrap() - 2.0).abs() < 1e-15);
        let p = NormProfile::new(vec![0.0, 32.0]).unwrap();
        assert_eq!(derivative_bounds(2, &p, Location::Boundary).unwrap(), 1.0);
        assert!(derivative_bounds(3, &p, Location::Boundary).is_err());
        assert_eq!(iterated_green_bound(1, c(0.0, 0.0)).unwrap(), 0.25);
        assert!((iterated_green_bound(2, c(0.0, 0.0)).unwrap() - 3.0 / 64.0).abs() < 1e-17);
        assert!((weighted_singular_bound(c(0.0, 0.0)).unwrap() - 8.0 / 15.0).abs() < 1e-16);
        assert!((weighted_singular_bound(c(0.5, 0.0)).unwrap() - 7.0 / 15.0).abs() < 1e-16);
    }

    #[test]
    fn norm_profile_validation() {
        assert!(NormProfile::new(vec![1.0]).is_err());
        assert!(NormProfile::new(vec![1.0, -1.0]).is_err());
        assert!(NormProfile::new(vec![1.0, f64::NAN]).is_err());
    }
}
