//! Run reports and their JSON/CSV encodings.

use std::io::Write;
use std::path::Path;

use polydisk_core::analysis::DistortionReport;
use polydisk_core::bounds::{BoundsReport, Certificate};
use polydisk_core::fixtures::LogStretchReport;
use polydisk_core::identities::IdentityCheck;
use polydisk_core::solver::{ComponentCheck, ResidualReport, Solution};
use polydisk_core::DiskGrid;
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const REPORT_KIND: &str = "run_report";
pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridMeta {
    pub n_r: usize,
    pub n_theta: usize,
    pub radial_nodes: Vec<f64>,
}

impl GridMeta {
    pub fn of(grid: &DiskGrid) -> Self {
        Self { n_r: grid.n_r(), n_theta: grid.n_theta(), radial_nodes: grid.radial_nodes().to_vec() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionBlock {
    /// Row-major: radius index outer, angle index inner; θⱼ = 2πj/n_theta.
    pub values: Vec<[f64; 2]>,
    /// Max deviation of f from its recorded decomposition.
    pub bookkeeping_error: f64,
    pub component_checks: Vec<ComponentCheck>,
}

impl SolutionBlock {
    pub fn of(sol: &Solution) -> Self {
        Self {
            values: sol.f.values().iter().map(|v| [v.re, v.im]).collect(),
            bookkeeping_error: sol.bookkeeping_error(),
            component_checks: sol.component_checks.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistortionBlock {
    /// Cutoff used by spectral differentiation.
    pub derivative_tolerance: f64,
    pub derivative_warning: Option<String>,
    #[serde(flatten)]
    pub report: DistortionReport,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Timings {
    pub solve_s: f64,
    pub verify_s: f64,
    pub analysis_s: f64,
    pub bounds_s: f64,
    pub total_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub kind: &'static str,
    pub version: u32,
    pub command: String,
    pub source: String,
    pub n: usize,
    pub seed: u64,
    pub grid: GridMeta,
    /// ‖φₖ‖∞ for k = 1…n.
    pub norms: Vec<f64>,
    pub residuals: Option<ResidualReport>,
    pub solution: Option<SolutionBlock>,
    pub distortion: Option<DistortionBlock>,
    pub bounds: Option<BoundsReport>,
    pub certificates: Vec<Certificate>,
    pub log_stretch: Option<LogStretchReport>,
    pub timings: Timings,
}

/// serde_json formatter writing every float with 17 significant digits.
struct FullPrecision;

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        write!(writer, "{:.16e}", value as f64)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision);
    value.serialize(&mut ser).expect("report types serialize infallibly");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// 12 significant digits.
pub fn csv_number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.11e}")
    } else {
        String::new()
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Node table of the solution: `r,theta,re,im`.
pub fn solution_csv(report: &RunReport) -> String {
    let mut out = String::from("r,theta,re,im\n");
    if let Some(sol) = &report.solution {
        let n_t = report.grid.n_theta;
        for (idx, [re, im]) in sol.values.iter().enumerate() {
            let r = report.grid.radial_nodes[idx / n_t];
            let theta = 2.0 * std::f64::consts::PI * (idx % n_t) as f64 / n_t as f64;
            out.push_str(&format!("{},{},{},{}\n", csv_number(r), csv_number(theta), csv_number(*re), csv_number(*im)));
        }
    }
    out
}

/// Scalar summary: `section,name,value`.
pub fn summary_csv(report: &RunReport) -> String {
    let mut out = String::from("section,name,value\n");
    let mut row = |section: &str, name: &str, v: f64| {
        out.push_str(&format!("{section},{},{}\n", csv_field(name), csv_number(v)));
    };
    for (k, v) in report.norms.iter().enumerate() {
        row("input", &format!("norm_{}", k + 1), *v);
    }
    if let Some(r) = &report.residuals {
        row("residual", "tolerance", r.tolerance);
        row("residual", "volume", r.volume);
        for (j, t) in r.traces.iter().enumerate() {
            row("residual", &format!("trace_{j}"), *t);
        }
        row("residual", "passed", f64::from(u8::from(r.passed)));
    }
    if let Some(d) = &report.distortion {
        row("distortion", "derivative_tolerance", d.derivative_tolerance);
        row("distortion", "K_hat", d.report.k_hat);
        row("distortion", "K", d.report.k);
        row("distortion", "Kprime_hat", d.report.kprime_hat);
        row("distortion", "lipschitz_lower_hat", d.report.lipschitz_lower_hat);
        row("distortion", "lipschitz_upper_hat", d.report.lipschitz_upper_hat);
        row("distortion", "unresolved", d.report.unresolved as f64);
    }
    if let Some(b) = &report.bounds {
        for (kind, name, v) in b.rows() {
            if kind != "input" {
                row(&format!("bounds_{kind}"), &name, v);
            }
        }
    }
    for c in &report.certificates {
        row("certificate", &format!("{}_passed", c.name), f64::from(u8::from(c.passed)));
    }
    out
}

/// `identity,name,z_re,z_im,expected,computed,deviation,tolerance,passed`.
pub fn identity_csv(checks: &[IdentityCheck]) -> String {
    let mut out = String::from("identity,name,z_re,z_im,expected,computed,deviation,tolerance,passed\n");
    for c in checks {
        let (zr, zi) = c.z.map_or((String::new(), String::new()), |z| (csv_number(z.re), csv_number(z.im)));
        out.push_str(&format!(
            "{},{},{zr},{zi},{},{},{},{},{}\n",
            c.identity.label(),
            csv_field(&c.name),
            csv_number(c.expected),
            c.computed.map(csv_number).unwrap_or_default(),
            csv_number(c.deviation),
            csv_number(c.tolerance),
            c.passed
        ));
    }
    out
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let err = |source| CliError::Write { path: path.into(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(contents.as_bytes()).map_err(err)?;
    tmp.as_file().sync_all().map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}

/// Sends `contents` to `out`, or to stdout when no path is given.
pub fn emit(out: Option<&Path>, contents: &str) -> CliResult<()> {
    match out {
        Some(path) => write_atomic(path, contents),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(contents.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Write { path: "<stdout>".into(), source })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_seventeen_digits() {
        let s = to_json(&serde_json::json!({"x": 0.1, "n": 3, "bad": f64::NAN}));
        assert_eq!(s.trim(), r#"{"bad":null,"n":3,"x":1.0000000000000001e-1}"#);
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64(), Some(0.1));
    }

    #[test]
    fn csv_numbers() {
        assert_eq!(csv_number(1.0 / 3.0), "3.33333333333e-1");
        assert_eq!(csv_number(f64::INFINITY), "");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        write_atomic(&path, "one").unwrap();
        write_atomic(&path, "two").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        let missing = dir.path().join("no/such/dir/r.json");
        assert!(matches!(write_atomic(&missing, "x"), Err(CliError::Write { .. })));
    }
}
