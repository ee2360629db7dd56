//! Closed-form constants of the distortion theorems and the pass/fail
//! certificates built from them.
//!
//! The exact Mori constant Q(K) is unknown; every quantity here uses the Qiu
//! upper bound from [`mori_q_upper`], so co-Lipschitz coefficients are valid
//! lower bounds and Lipschitz coefficients valid upper bounds.

use std::f64::consts::FRAC_2_PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::{chordal_moment, NormProfile};
use crate::quadrature::chordal_power_quadrature;

const DECAY: f64 = 3.0 / 16.0;

/// Gauss nodes of the coarse level in the μ₁ circle integral.
pub const MU1_NODES: usize = 64;

fn check_k(k: f64) -> Result<()> {
    if !(k >= 1.0) || !k.is_finite() {
        return Err(Error::Domain(format!("distortion constant K = {k} must be a finite real >= 1")));
    }
    Ok(())
}

/// 16^{1−1/K}·min{(23/8)^{1−1/K}, (1+2^{3−2K})^{1/K}}, at least 1.
pub fn mori_q_upper(k: f64) -> Result<f64> {
    check_k(k)?;
    let e = 1.0 - 1.0 / k;
    let q = 16f64.powf(e) * (23.0f64 / 8.0).powf(e).min((1.0 + 2f64.powf(3.0 - 2.0 * k)).powf(1.0 / k));
    Ok(q.max(1.0))
}

/// Which of the two expressions for C₃ defines (M₂, N₂).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// M₂′ = μ₁^K, N₂′ = (μ₁+μ₂)^K − μ₁^K.
    Power,
    /// M₂″ = μ₁/(K − μ₁(K−1)), N₂″ = μ₂/(1 − μ₁(1−1/K)).
    Fraction,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipschitzCoefficients {
    pub q_upper: f64,
    pub mu1: f64,
    /// Two-level quadrature error of μ₁.
    pub mu1_error: f64,
    pub mu2: f64,
    pub mu3: f64,
    pub mu4: f64,
    /// Undefined when (1 − 1/K)μ₁ ≥ 1.
    pub mu5: Option<f64>,
    pub mu6: f64,
    pub c3: f64,
    pub m1_star: f64,
    pub m2_star: Option<f64>,
    pub branch: Branch,
    pub m2: f64,
    pub n2: f64,
}

/// μ₁ = K·Q^{1/K+1}·(1/2π)∫|1 − e^{it}|^{−1+1/K²} dt with its error.
fn mu1(k: f64, q: f64) -> Result<(f64, f64)> {
    if k == 1.0 {
        return Ok((1.0, 0.0));
    }
    let integral = chordal_power_quadrature(-1.0 + 1.0 / (k * k), MU1_NODES)?;
    let s = k * q.powf(1.0 / k + 1.0);
    Ok((s * integral.value.re, s * integral.error))
}

pub fn lipschitz_coefficients(k: f64, profile: &NormProfile) -> Result<LipschitzCoefficients> {
    let q = mori_q_upper(k)?;
    let (mu1, mu1_error) = mu1(k, q)?;
    let tail = profile.weighted_sum(2, |j| DECAY.powi(j as i32 - 2) / 16.0);
    let phi1 = profile.norm(1)?;
    let mu3 = k * phi1 / 2.0 + k * tail;
    let mu4 = 7.0 / 6.0 * phi1 + profile.weighted_sum(2, |j| 47.0 / 240.0 * DECAY.powi(j as i32 - 2));
    let mu2 = mu3 + mu4;
    let contraction = mu1 * (1.0 - 1.0 / k);
    let single = contraction < 1.0;
    let mu5 = single.then(|| (mu1 / k + mu2) / (1.0 - contraction));
    let mu6 = (mu1 + mu2).powf(k);

    let m2_power = mu1.powf(k);
    // (μ₁+μ₂)^K − μ₁^K without cancellation for small μ₂.
    let n2_power = m2_power * (k * (mu2 / mu1).ln_1p()).exp_m1();
    let m1_star = m2_power + n2_power;
    let (m2_star, c3, branch, m2, n2) = if single {
        let m2_fraction = mu1 / (k - mu1 * (k - 1.0));
        let n2_fraction = mu2 / (1.0 - contraction);
        let m2_star = m2_fraction + n2_fraction;
        let c3 = mu6.min(mu5.expect("defined when contraction < 1"));
        if m1_star > m2_star {
            (Some(m2_star), c3, Branch::Fraction, m2_fraction, n2_fraction)
        } else {
            (Some(m2_star), c3, Branch::Power, m2_power, n2_power)
        }
    } else {
        (None, mu6, Branch::Power, m2_power, n2_power)
    };

    Ok(LipschitzCoefficients {
        q_upper: q,
        mu1,
        mu1_error,
        mu2,
        mu3,
        mu4,
        mu5,
        mu6,
        c3,
        m1_star,
        m2_star,
        branch,
        m2,
        n2,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColipschitzCoefficients {
    pub q_upper: f64,
    pub chordal: f64,
    pub mu7_mori: f64,
    pub mu7_norms: f64,
    pub mu7: f64,
    pub mu8: f64,
    pub c1: f64,
    pub m1: f64,
    pub n1: f64,
    /// Summands of N₁, entry k−1 for ‖φₖ‖.
    pub n1_terms: Vec<f64>,
}

fn n1_terms(k: f64, profile: &NormProfile) -> Vec<f64> {
    profile
        .norms()
        .iter()
        .enumerate()
        .map(|(idx, norm)| {
            let j = idx + 1;
            if j == 1 {
                (7.0 / 6.0 + 1.0 / (2.0 * k * k)) * norm
            } else {
                (47.0 / 240.0 + 1.0 / (16.0 * k * k)) * norm * DECAY.powi(j as i32 - 2)
            }
        })
        .collect()
}

pub fn colipschitz_coefficients(k: f64, profile: &NormProfile) -> Result<ColipschitzCoefficients> {
    let q = mori_q_upper(k)?;
    let chordal = chordal_moment(k)?;
    let mu7_mori = q.powf(-2.0 * k) * chordal;
    let mu7_norms = 0.5 - profile.weighted_sum(1, |j| DECAY.powi(j as i32 - 1) / 8.0);
    let mu7 = mu7_mori.max(mu7_norms);
    let phi1 = profile.norm(1)?;
    let mu8 = phi1 / 2.0 + profile.weighted_sum(2, |j| DECAY.powi(j as i32 - 2) / 16.0);
    let k2 = k * k;
    let c1 = mu7 / k2
        - (1.0 + 1.0 / k2) * mu8
        - 2.0 / 3.0 * phi1
        - profile.weighted_sum(2, |j| 2.0 / 15.0 * DECAY.powi(j as i32 - 2));
    let m1 = mu7_mori / k2;
    let terms = n1_terms(k, profile);
    let n1 = terms.iter().sum();
    Ok(ColipschitzCoefficients { q_upper: q, chordal, mu7_mori, mu7_norms, mu7, mu8, c1, m1, n1, n1_terms: terms })
}

/// A named inequality lhs > rhs; `passed` is exactly `margin > 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub passed: bool,
    /// Summands of the right side, when it is a sum over the data.
    pub terms: Vec<f64>,
}

impl Certificate {
    fn new(name: &str, lhs: f64, rhs: f64, terms: Vec<f64>) -> Self {
        let margin = lhs - rhs;
        Self { name: name.to_string(), lhs, rhs, margin, passed: margin > 0.0, terms }
    }
}

pub const TUE_1: &str = "tue-1";
pub const TUE_2: &str = "tue-2";
pub const THM_14A: &str = "thm-1.4a";

/// Co-Lipschitz sufficient conditions: M₁(K) > N₁ (tue-1) and
/// 1/(K²·46^{2K−2}) > N₁ (tue-2).
pub fn corollary_certificates(k: f64, profile: &NormProfile) -> Result<Vec<Certificate>> {
    let co = colipschitz_coefficients(k, profile)?;
    let tue2_lhs = 1.0 / (k * k * 46f64.powf(2.0 * k - 2.0));
    Ok(vec![
        Certificate::new(TUE_1, co.m1, co.n1, co.n1_terms.clone()),
        Certificate::new(TUE_2, tue2_lhs, co.n1, co.n1_terms),
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KKprimeCoefficients {
    pub h: f64,
    pub b: f64,
    pub hypothesis_a: bool,
    pub hypothesis_margin: f64,
    pub k_star: f64,
    pub part_a_coefficient: f64,
    pub l_kstar: f64,
    pub m3: f64,
    pub n3: f64,
    pub m4: f64,
    pub n4: f64,
}

/// 𝓗 = ‖φ₁‖/3 + (1/15)Σ_{k≥2}(3/16)^{k−2}‖φₖ‖.
pub fn norm_aggregate(profile: &NormProfile) -> Result<f64> {
    Ok(profile.norm(1)? / 3.0 + profile.weighted_sum(2, |j| DECAY.powi(j as i32 - 2) / 15.0))
}

/// Default for L_{K*}: the constant branch of max{2/π, L_{K*}}.
pub fn default_l(_k_star: f64) -> f64 {
    FRAC_2_PI
}

/// Constants for (K,K′)-quasiconformal solutions. `p0` is |P[φ₀](0)| and
/// `l` supplies L_{K*}.
pub fn kkprime_coefficients(
    k: f64,
    kprime: f64,
    p0: f64,
    profile: &NormProfile,
    l: &dyn Fn(f64) -> f64,
) -> Result<KKprimeCoefficients> {
    check_k(k)?;
    if !(kprime >= 0.0) || !kprime.is_finite() {
        return Err(Error::Domain(format!("K' = {kprime} must be finite and nonnegative")));
    }
    if !(0.0..1.0).contains(&p0) {
        return Err(Error::Domain(format!("|P[phi0](0)| = {p0} must lie in [0, 1)")));
    }
    let h = norm_aggregate(profile)?;
    let root = kprime.sqrt();
    let b = FRAC_2_PI - p0;
    let hypothesis_margin = FRAC_2_PI - (p0 + root + 2.0 * k * h);
    let denominator = b - 2.0 * k * h - root;
    if denominator <= 0.0 {
        return Err(Error::HypothesisViolated { denominator });
    }
    let k_star = (k * b + 2.0 * k * h + root) / denominator;
    let ratio = (1.0 + k_star) / (k_star * (1.0 + k));
    let part_a_coefficient = ratio * b - (2.0 * h + root) / (k + 1.0);
    let m3 = k_star.powf(3.0 * k_star + 1.0) * 2f64.powf(2.5 * (k_star - 1.0 / k_star));
    let n3 = 2.0 / 3.0 * profile.norm(1)? + profile.weighted_sum(2, |j| 2.0 / 15.0 * DECAY.powi(j as i32 - 1));
    let l_kstar = l(k_star);
    let m4 = ratio * FRAC_2_PI.max(l_kstar) - root / (k + 1.0);
    let n4 = 2.0 * h / (k + 1.0);
    Ok(KKprimeCoefficients {
        h,
        b,
        hypothesis_a: hypothesis_margin > 0.0,
        hypothesis_margin,
        k_star,
        part_a_coefficient,
        l_kstar,
        m3,
        n3,
        m4,
        n4,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub k: f64,
    pub kprime: f64,
    pub p0: f64,
    pub norms: Vec<f64>,
    pub q_upper: f64,
    pub lipschitz: LipschitzCoefficients,
    pub colipschitz: ColipschitzCoefficients,
    /// `None` when the (K,K′) hypothesis fails.
    pub kkprime: Option<KKprimeCoefficients>,
    /// (1, C₃): bracket for the Lipschitz coefficient C₂.
    pub c2_bracket: (f64, f64),
    pub m1: f64,
    pub n1: f64,
    pub m2: f64,
    pub n2: f64,
    pub certificates: Vec<Certificate>,
    pub note: &'static str,
}

pub const Q_NOTE: &str = "Q(K) is replaced by the Qiu upper bound; lower coefficients are conservative lower \
                          bounds and upper coefficients conservative upper bounds";

impl BoundsReport {
    pub fn certificate(&self, name: &str) -> Option<&Certificate> {
        self.certificates.iter().find(|c| c.name == name)
    }

    /// Flat (kind, name, value) rows in a fixed order.
    pub fn rows(&self) -> Vec<(&'static str, String, f64)> {
        let mut rows: Vec<(&'static str, String, f64)> = Vec::new();
        let mut push = |kind: &'static str, name: &str, v: f64| rows.push((kind, name.to_string(), v));
        push("input", "K", self.k);
        push("input", "Kprime", self.kprime);
        push("input", "P0", self.p0);
        for (i, v) in self.norms.iter().enumerate() {
            push("input", &format!("norm_{}", i + 1), *v);
        }
        let lip = &self.lipschitz;
        push("constant", "Q_upper", self.q_upper);
        push("constant", "mu1", lip.mu1);
        push("constant", "mu1_error", lip.mu1_error);
        push("constant", "mu2", lip.mu2);
        push("constant", "mu3", lip.mu3);
        push("constant", "mu4", lip.mu4);
        push("constant", "mu5", lip.mu5.unwrap_or(f64::NAN));
        push("constant", "mu6", lip.mu6);
        let co = &self.colipschitz;
        push("constant", "mu7", co.mu7);
        push("constant", "mu8", co.mu8);
        push("constant", "C1", co.c1);
        push("constant", "C2_lower", self.c2_bracket.0);
        push("constant", "C3", self.c2_bracket.1);
        push("constant", "M1", self.m1);
        push("constant", "N1", self.n1);
        push("constant", "M2", self.m2);
        push("constant", "N2", self.n2);
        if let Some(kk) = &self.kkprime {
            push("constant", "H", kk.h);
            push("constant", "K_star", kk.k_star);
            push("constant", "part_a_coefficient", kk.part_a_coefficient);
            push("constant", "M3", kk.m3);
            push("constant", "N3", kk.n3);
            push("constant", "M4", kk.m4);
            push("constant", "N4", kk.n4);
        }
        for c in &self.certificates {
            push("margin", &c.name, c.margin);
        }
        rows
    }
}

/// Every constant and certificate for the given inputs.
pub fn bounds_report(
    k: f64,
    kprime: f64,
    p0: f64,
    profile: &NormProfile,
    l: &dyn Fn(f64) -> f64,
) -> Result<BoundsReport> {
    let lipschitz = lipschitz_coefficients(k, profile)?;
    let colipschitz = colipschitz_coefficients(k, profile)?;
    let mut certificates = corollary_certificates(k, profile)?;
    let kkprime = match kkprime_coefficients(k, kprime, p0, profile, l) {
        Ok(v) => Some(v),
        Err(Error::HypothesisViolated { .. }) => None,
        Err(e) => return Err(e),
    };
    let h = norm_aggregate(profile)?;
    certificates.push(Certificate::new(THM_14A, FRAC_2_PI, p0 + kprime.sqrt() + 2.0 * k * h, Vec::new()));
    Ok(BoundsReport {
        k,
        kprime,
        p0,
        norms: profile.norms().to_vec(),
        q_upper: lipschitz.q_upper,
        c2_bracket: (1.0, lipschitz.c3),
        m1: colipschitz.m1,
        n1: colipschitz.n1,
        m2: lipschitz.m2,
        n2: lipschitz.n2,
        lipschitz,
        colipschitz,
        kkprime,
        certificates,
        note: Q_NOTE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mori_bound_values() {
        assert_eq!(mori_q_upper(1.0).unwrap(), 1.0);
        assert!((mori_q_upper(2.0).unwrap() - 4.0 * 1.5f64.sqrt()).abs() < 1e-12);
        assert!(mori_q_upper(0.9).is_err());
    }

    #[test]
    fn identity_limit() {
        let zero = NormProfile::zeros(2).unwrap();
        let lip = lipschitz_coefficients(1.0, &zero).unwrap();
        assert_eq!((lip.mu1, lip.mu2, lip.c3, lip.m2, lip.n2), (1.0, 0.0, 1.0, 1.0, 0.0));
        let co = colipschitz_coefficients(1.0, &zero).unwrap();
        assert_eq!((co.m1, co.n1, co.c1), (1.0, 0.0, 1.0));
    }
}
