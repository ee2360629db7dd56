//! Problem files: strict JSON, one schema version.

use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use polydisk_core::solver::PolyharmonicProblem;
use polydisk_core::{BoundaryFunction, DiskFunction, DiskGrid};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::expr::Expr;

pub const PROBLEM_VERSION: u32 = 1;

pub const DEFAULT_RESIDUAL_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_DERIVATIVE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub version: u32,
    pub n: usize,
    /// Δⁿf in the disk.
    pub phi_volume: VolumeData,
    /// Entry k is the trace of Δᵏf, k = 0…n−1.
    pub phi_boundary: Vec<BoundaryData>,
    pub grid: GridSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n_r: usize,
    pub n_theta: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_residual")]
    pub residual: f64,
    #[serde(default = "default_derivative")]
    pub derivative: f64,
}

fn default_residual() -> f64 {
    DEFAULT_RESIDUAL_TOLERANCE
}

fn default_derivative() -> f64 {
    DEFAULT_DERIVATIVE_TOLERANCE
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { residual: DEFAULT_RESIDUAL_TOLERANCE, derivative: DEFAULT_DERIVATIVE_TOLERANCE }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum VolumeData {
    Expr(String),
    Table(RadialTable),
}

/// Σ_m p_m(r) e^{imθ} with p_m linear between the tabulated radii and
/// constant beyond them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialTable {
    pub radii: Vec<f64>,
    pub modes: Vec<ModeProfile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeProfile {
    pub m: i64,
    /// [re, im] at each tabulated radius.
    pub values: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryData {
    /// Evaluated at z = e^{iθ}.
    Expr(String),
    Fourier(Vec<FourierCoeff>),
    /// [re, im] at θⱼ = 2πj/N.
    Samples(Vec<[f64; 2]>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierCoeff {
    pub m: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl ProblemSpec {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| CliError::Parse(format!("problem file: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })?;
        Self::from_json(&text)
    }

    fn validate(&self) -> CliResult<()> {
        let fail = |m: String| Err(CliError::Parse(m));
        if self.version != PROBLEM_VERSION {
            return fail(format!("unsupported problem version {} (expected {PROBLEM_VERSION})", self.version));
        }
        if self.n < 2 {
            return fail(format!("n = {} must be at least 2", self.n));
        }
        if self.phi_boundary.len() != self.n {
            return fail(format!(
                "phi_boundary has {} entries but n = {} requires one per k = 0..n-1",
                self.phi_boundary.len(),
                self.n
            ));
        }
        for (name, v) in [("residual", self.tolerances.residual), ("derivative", self.tolerances.derivative)] {
            if !(v > 0.0 && v.is_finite()) {
                return fail(format!("tolerance '{name}' must be positive, got {v}"));
            }
        }
        Ok(())
    }

    /// Compiles the data to samples on `grid`.
    pub fn to_problem(&self, grid: &Arc<DiskGrid>) -> CliResult<PolyharmonicProblem> {
        let volume = volume_samples(&self.phi_volume, grid)?;
        let boundary = self
            .phi_boundary
            .iter()
            .enumerate()
            .map(|(k, b)| {
                boundary_samples(b, grid.n_theta()).map_err(|e| with_context(e, &format!("phi_boundary[{k}]")))
            })
            .collect::<CliResult<Vec<_>>>()?;
        PolyharmonicProblem::new(volume, boundary).map_err(|e| CliError::Parse(e.to_string()))
    }
}

fn with_context(e: CliError, what: &str) -> CliError {
    match e {
        CliError::Parse(m) => CliError::Parse(format!("{what}: {m}")),
        other => other,
    }
}

fn parse_expr(src: &str) -> CliResult<Expr> {
    Expr::parse(src).map_err(|e| CliError::Parse(e.to_string()))
}

fn core_parse(e: polydisk_core::Error) -> CliError {
    CliError::Parse(e.to_string())
}

fn volume_samples(data: &VolumeData, grid: &Arc<DiskGrid>) -> CliResult<DiskFunction> {
    match data {
        VolumeData::Expr(src) => {
            let e = parse_expr(src).map_err(|e| with_context(e, "phi_volume"))?;
            DiskFunction::from_fn(grid.clone(), |z| e.eval(z)).map_err(core_parse)
        }
        VolumeData::Table(t) => {
            t.validate()?;
            DiskFunction::from_fn(grid.clone(), |z| t.eval(z)).map_err(core_parse)
        }
    }
}

fn boundary_samples(data: &BoundaryData, n_theta: usize) -> CliResult<BoundaryFunction> {
    match data {
        BoundaryData::Expr(src) => {
            let e = parse_expr(src)?;
            BoundaryFunction::from_fn(n_theta, |t| e.eval(Complex64::from_polar(1.0, t))).map_err(core_parse)
        }
        BoundaryData::Fourier(coeffs) => {
            let max = coeffs.iter().map(|c| c.m.unsigned_abs()).max().unwrap_or(0);
            if 2 * max as usize >= n_theta {
                return Err(CliError::Parse(format!(
                    "mode {max} is not resolved by {n_theta} angles; raise n_theta above {}",
                    2 * max
                )));
            }
            BoundaryFunction::from_modes(n_theta, coeffs.iter().map(|c| (c.m, Complex64::new(c.re, c.im))))
                .map_err(core_parse)
        }
        BoundaryData::Samples(values) => {
            let samples = values.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
            BoundaryFunction::from_samples(samples).and_then(|b| b.resample(n_theta)).map_err(core_parse)
        }
    }
}

impl RadialTable {
    fn validate(&self) -> CliResult<()> {
        let fail = |m: String| Err(CliError::Parse(format!("phi_volume table: {m}")));
        if self.radii.is_empty() {
            return fail("no radii".into());
        }
        if self.radii.windows(2).any(|w| !(w[0] < w[1])) || self.radii.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return fail("radii must increase strictly within [0, 1]".into());
        }
        for p in &self.modes {
            if p.values.len() != self.radii.len() {
                return fail(format!("mode {} has {} values for {} radii", p.m, p.values.len(), self.radii.len()));
            }
        }
        Ok(())
    }

    fn eval(&self, z: Complex64) -> Complex64 {
        let r = z.norm();
        let theta = z.arg();
        let idx = self.radii.partition_point(|&x| x <= r);
        self.modes
            .iter()
            .map(|p| {
                let at = |i: usize| Complex64::new(p.values[i][0], p.values[i][1]);
                let v = if idx == 0 {
                    at(0)
                } else if idx == self.radii.len() {
                    at(idx - 1)
                } else {
                    let (r0, r1) = (self.radii[idx - 1], self.radii[idx]);
                    let s = (r - r0) / (r1 - r0);
                    at(idx - 1) * (1.0 - s) + at(idx) * s
                };
                v * Complex64::from_polar(1.0, p.m as f64 * theta)
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "version": 1, "n": 2,
        "phi_volume": {"expr": "-16/15"},
        "phi_boundary": [{"fourier": [{"m": 1, "re": 1}]}, {"expr": "-1/5"}],
        "grid": {"n_r": 16, "n_theta": 32}
    }"#;

    #[test]
    fn parses_minimal_problem() {
        let spec = ProblemSpec::from_json(MINIMAL).unwrap();
        assert_eq!(spec.tolerances, Tolerances::default());
        let grid = DiskGrid::shared(16, 32).unwrap();
        let p = spec.to_problem(&grid).unwrap();
        assert_eq!(p.n(), 2);
        assert!((p.boundary(0).unwrap().coeff(1) - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn strict_schema() {
        let extra = MINIMAL.replacen("\"n\": 2", "\"n\": 2, \"colour\": 1", 1);
        assert!(matches!(ProblemSpec::from_json(&extra), Err(CliError::Parse(_))));
        let missing_version = MINIMAL.replacen("\"version\": 1,", "", 1);
        assert!(ProblemSpec::from_json(&missing_version).is_err());
        let wrong_version = MINIMAL.replacen("\"version\": 1", "\"version\": 9", 1);
        assert!(ProblemSpec::from_json(&wrong_version).is_err());
        let short = MINIMAL.replacen("\"n\": 2", "\"n\": 3", 1);
        assert!(ProblemSpec::from_json(&short).is_err());
    }

    #[test]
    fn radial_table_interpolates() {
        let t = RadialTable {
            radii: vec![0.0, 1.0],
            modes: vec![ModeProfile { m: 1, values: [[0.0, 0.0], [2.0, 0.0]].to_vec() }],
        };
        let z = Complex64::new(0.0, 0.5);
        assert!((t.eval(z) - 2.0 * z).norm() < 1e-15);
    }
}
