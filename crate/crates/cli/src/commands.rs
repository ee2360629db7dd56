use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use polydisk_core::analysis::{distortion_report, wirtinger_with_tolerance};
use polydisk_core::bounds::{bounds_report, default_l, BoundsReport, Certificate, THM_14A, TUE_1, TUE_2};
use polydisk_core::fixtures::{log_stretch_report, near_identity};
use polydisk_core::identities::{run_identity_suite, Identity, IdentityCheck, SuiteConfig};
use polydisk_core::solver::{solve, verify_solution};
use polydisk_core::{DiskGrid, NormProfile};
use serde::Serialize;

use crate::error::{CliError, CliResult, EXIT_CERTIFICATE_FAILED, EXIT_CHECK_FAILED, EXIT_HYPOTHESIS, EXIT_OK};
use crate::problem::ProblemSpec;
use crate::report::{
    emit, identity_csv, solution_csv, summary_csv, to_json, DistortionBlock, Format, GridMeta, RunReport,
    SolutionBlock, Timings, REPORT_KIND, REPORT_VERSION,
};

pub const EXAMPLE_1_5: &str = include_str!("../fixtures/example-1.5.json");
pub const EXAMPLE_1_6: &str = include_str!("../fixtures/example-1.6.json");

/// Random pairs for the empirical bi-Lipschitz estimate.
pub const DEFAULT_PAIRS: usize = 2000;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Flags {
    pub grid: Option<(usize, usize)>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

/// How far a run goes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Solve,
    Analyze,
    Certify,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub stage: Stage,
    /// K for the defect; K_hat when `None`.
    pub defect_k: Option<f64>,
    pub pairs: usize,
}

impl RunOptions {
    pub fn new(stage: Stage) -> Self {
        Self { stage, defect_k: None, pairs: DEFAULT_PAIRS }
    }
}

/// Solve, verify and optionally analyze and certify one problem.
pub fn run_problem(
    spec: &ProblemSpec,
    command: &str,
    source: &str,
    flags: &Flags,
    opts: RunOptions,
) -> CliResult<RunReport> {
    let start = Instant::now();
    let (n_r, n_theta) = flags.grid.unwrap_or((spec.grid.n_r, spec.grid.n_theta));
    let grid: Arc<DiskGrid> = DiskGrid::shared(n_r, n_theta).map_err(|e| CliError::Parse(e.to_string()))?;
    let problem = spec.to_problem(&grid)?;
    let tol = flags.tol.unwrap_or(spec.tolerances.residual);
    let seed = flags.seed.unwrap_or(spec.seed);
    let norms = problem.norm_profile();
    let mut timings = Timings::default();

    let t = Instant::now();
    let sol = solve(&problem)?;
    timings.solve_s = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let residuals = verify_solution(&sol, tol)?;
    timings.verify_s = t.elapsed().as_secs_f64();

    let mut distortion = None;
    if opts.stage >= Stage::Analyze {
        let t = Instant::now();
        let df = wirtinger_with_tolerance(&sol.f, spec.tolerances.derivative)?;
        let report = distortion_report(&sol.f, &df, opts.defect_k, opts.pairs, seed)?;
        distortion = Some(DistortionBlock {
            derivative_tolerance: spec.tolerances.derivative,
            derivative_warning: df.warning.clone(),
            report,
        });
        timings.analysis_s = t.elapsed().as_secs_f64();
    }

    let mut bounds = None;
    if let (Stage::Certify, Some(d)) = (opts.stage, &distortion) {
        let t = Instant::now();
        bounds = Some(bounds_report(d.report.k_hat, d.report.kprime_hat, 0.0, &norms, &default_l)?);
        timings.bounds_s = t.elapsed().as_secs_f64();
    }
    timings.total_s = start.elapsed().as_secs_f64();

    Ok(RunReport {
        kind: REPORT_KIND,
        version: REPORT_VERSION,
        command: command.to_string(),
        source: source.to_string(),
        n: problem.n(),
        seed,
        grid: GridMeta::of(&grid),
        norms: norms.norms().to_vec(),
        residuals: Some(residuals),
        solution: Some(SolutionBlock::of(&sol)),
        distortion,
        certificates: bounds.as_ref().map(|b| b.certificates.clone()).unwrap_or_default(),
        bounds,
        log_stretch: None,
        timings,
    })
}

fn fail(e: CliError) -> i32 {
    eprintln!("error: {e}");
    e.exit_code()
}

fn status(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

fn describe_run(report: &RunReport) {
    if let Some(r) = &report.residuals {
        eprintln!(
            "residuals: volume {:.3e}, traces [{}] (tolerance {:.1e}): {}",
            r.volume,
            r.traces.iter().map(|t| format!("{t:.3e}")).collect::<Vec<_>>().join(", "),
            r.tolerance,
            status(r.passed)
        );
        if let Some(w) = &r.warning {
            eprintln!("warning: {w}");
        }
    }
    if let Some(d) = &report.distortion {
        let r = &d.report;
        eprintln!(
            "distortion: K_hat {:.9} at {:.4}{:+.4}i; defect at K = {:.9} is {:.3e}",
            r.k_hat, r.argmax.re, r.argmax.im, r.k, r.kprime_hat
        );
        eprintln!(
            "empirical bi-Lipschitz: lower {:.6e}, upper {:.6e} ({} random pairs, seed {})",
            r.lipschitz_lower_hat, r.lipschitz_upper_hat, r.n_pairs, r.seed
        );
        if let Some(w) = &d.derivative_warning {
            eprintln!("warning: {w}");
        }
    }
    describe_certificates(&report.certificates);
}

fn describe_certificates(certs: &[Certificate]) {
    for c in certs {
        eprintln!(
            "certificate {}: lhs {:.9} rhs {:.9} margin {:+.9}: {}",
            c.name,
            c.lhs,
            c.rhs,
            c.margin,
            status(c.passed)
        );
    }
}

fn emit_run(report: &RunReport, flags: &Flags, csv: fn(&RunReport) -> String) -> CliResult<()> {
    let text = match flags.format {
        Format::Json => to_json(report),
        Format::Csv => csv(report),
    };
    emit(flags.out.as_deref(), &text)
}

fn residual_exit(report: &RunReport) -> i32 {
    match &report.residuals {
        Some(r) if !r.passed => EXIT_CHECK_FAILED,
        _ => EXIT_OK,
    }
}

pub fn cmd_solve(spec_path: &Path, flags: &Flags) -> i32 {
    let run = || -> CliResult<RunReport> {
        let spec = ProblemSpec::load(spec_path)?;
        let report =
            run_problem(&spec, "solve", &spec_path.display().to_string(), flags, RunOptions::new(Stage::Solve))?;
        emit_run(&report, flags, solution_csv)?;
        Ok(report)
    };
    match run() {
        Ok(report) => {
            describe_run(&report);
            residual_exit(&report)
        }
        Err(e) => fail(e),
    }
}

pub fn cmd_analyze(spec_path: &Path, flags: &Flags) -> i32 {
    let run = || -> CliResult<RunReport> {
        let spec = ProblemSpec::load(spec_path)?;
        let report =
            run_problem(&spec, "analyze", &spec_path.display().to_string(), flags, RunOptions::new(Stage::Analyze))?;
        emit_run(&report, flags, summary_csv)?;
        Ok(report)
    };
    match run() {
        Ok(report) => {
            describe_run(&report);
            residual_exit(&report)
        }
        Err(e) => fail(e),
    }
}

/// Inputs of `certify` that are not read from a file.
#[derive(Debug, Clone, PartialEq)]
pub struct CertifyOptions {
    pub k: Option<f64>,
    pub kprime: Option<f64>,
    pub p0: f64,
    pub norms: Option<Vec<f64>>,
    /// A certificate name or "all".
    pub certificate: String,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self { k: None, kprime: None, p0: 0.0, norms: None, certificate: TUE_2.to_string() }
    }
}

pub const CERTIFICATE_NAMES: [&str; 4] = [TUE_1, TUE_2, THM_14A, "all"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifyReport {
    pub kind: &'static str,
    pub version: u32,
    pub source: String,
    pub requested: String,
    pub passed: bool,
    pub bounds: BoundsReport,
}

/// K, K′ and the norm profile taken from a problem file or a run report.
fn certify_inputs(input: &Path, flags: &Flags) -> CliResult<(f64, f64, Vec<f64>)> {
    let text = std::fs::read_to_string(input).map_err(|source| CliError::Read { path: input.into(), source })?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", input.display())))?;
    if value.get("kind").and_then(|k| k.as_str()) == Some(REPORT_KIND) {
        let num = |ptr: &str| {
            value.pointer(ptr).and_then(|v| v.as_f64()).ok_or_else(|| {
                CliError::Parse(format!("run report lacks {ptr}; run `analyze` to produce a distortion block"))
            })
        };
        let k = num("/distortion/k_hat")?;
        let kprime = num("/distortion/kprime_hat")?;
        let norms = value
            .get("norms")
            .and_then(|n| n.as_array())
            .and_then(|a| a.iter().map(|v| v.as_f64()).collect::<Option<Vec<_>>>())
            .ok_or_else(|| CliError::Parse("run report lacks a numeric 'norms' array".into()))?;
        return Ok((k, kprime, norms));
    }
    let spec = ProblemSpec::from_json(&text)?;
    let report = run_problem(&spec, "certify", &input.display().to_string(), flags, RunOptions::new(Stage::Analyze))?;
    let d = report.distortion.expect("analyze stage fills the distortion block");
    Ok((d.report.k_hat, d.report.kprime_hat, report.norms))
}

/// Exit status for the requested certificate(s).
fn certificate_exit(bounds: &BoundsReport, requested: &str) -> i32 {
    let failed: Vec<&str> = bounds
        .certificates
        .iter()
        .filter(|c| (requested == "all" || c.name == requested) && !c.passed)
        .map(|c| c.name.as_str())
        .collect();
    if failed.is_empty() {
        EXIT_OK
    } else if failed == [THM_14A] {
        EXIT_HYPOTHESIS
    } else {
        EXIT_CERTIFICATE_FAILED
    }
}

pub fn cmd_certify(input: Option<&Path>, opts: &CertifyOptions, flags: &Flags) -> i32 {
    if !CERTIFICATE_NAMES.contains(&opts.certificate.as_str()) {
        return fail(CliError::Parse(format!(
            "unknown certificate '{}'; expected one of {}",
            opts.certificate,
            CERTIFICATE_NAMES.join(", ")
        )));
    }
    let run = || -> CliResult<CertifyReport> {
        let (k, kprime, norms, source) = match (input, &opts.norms) {
            (Some(path), _) => {
                let (k, kprime, norms) = certify_inputs(path, flags)?;
                let norms = opts.norms.clone().unwrap_or(norms);
                (opts.k.unwrap_or(k), opts.kprime.unwrap_or(kprime), norms, path.display().to_string())
            }
            (None, Some(norms)) => {
                let k = opts.k.ok_or_else(|| CliError::Parse("--k is required without an input file".into()))?;
                (k, opts.kprime.unwrap_or(0.0), norms.clone(), "command line".to_string())
            }
            (None, None) => {
                return Err(CliError::Parse("give a problem file, a run report, or --k with --norms".into()))
            }
        };
        let profile = NormProfile::new(norms).map_err(|e| CliError::Parse(e.to_string()))?;
        let bounds = bounds_report(k, kprime, opts.p0, &profile, &default_l).map_err(|e| match e {
            polydisk_core::Error::Domain(m) => CliError::Parse(m),
            other => CliError::Core(other),
        })?;
        let passed = certificate_exit(&bounds, &opts.certificate) == EXIT_OK;
        let report = CertifyReport {
            kind: "certify_report",
            version: REPORT_VERSION,
            source,
            requested: opts.certificate.clone(),
            passed,
            bounds,
        };
        let text = match flags.format {
            Format::Json => to_json(&report),
            Format::Csv => {
                let mut out = String::from("kind,name,value\n");
                for (kind, name, v) in report.bounds.rows() {
                    out.push_str(&format!("{kind},{name},{}\n", crate::report::csv_number(v)));
                }
                out
            }
        };
        emit(flags.out.as_deref(), &text)?;
        Ok(report)
    };
    match run() {
        Ok(report) => {
            let b = &report.bounds;
            eprintln!(
                "K {:.9}, K' {:.3e}, P0 {:.3e}, norms [{}]",
                b.k,
                b.kprime,
                b.p0,
                b.norms.iter().map(|v| format!("{v:.6e}")).collect::<Vec<_>>().join(", ")
            );
            eprintln!("M1 {:.9} N1 {:.9} M2 {:.9} N2 {:.9} C3 {:.9}", b.m1, b.n1, b.m2, b.n2, b.c2_bracket.1);
            if let Some(kk) = &b.kkprime {
                eprintln!("K* {:.9} M3 {:.9} N3 {:.9} M4 {:.9} N4 {:.9}", kk.k_star, kk.m3, kk.n3, kk.m4, kk.n4);
            } else {
                eprintln!("(K,K') hypothesis fails: K* undefined");
            }
            describe_certificates(&b.certificates);
            certificate_exit(b, &report.requested)
        }
        Err(e) => fail(e),
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LemmaOptions {
    pub points: Vec<Complex64>,
    pub lemmas: Vec<String>,
}

fn suite_config(opts: &LemmaOptions, flags: &Flags) -> CliResult<SuiteConfig> {
    let mut config = SuiteConfig::default();
    if let Some(g) = flags.grid {
        config.grid = g;
    }
    if !opts.points.is_empty() {
        config.points = opts.points.clone();
    }
    if !opts.lemmas.is_empty() {
        config.identities = opts
            .lemmas
            .iter()
            .map(|l| {
                Identity::from_label(l).ok_or_else(|| {
                    let known: Vec<&str> = Identity::ALL.iter().map(|i| i.label()).collect();
                    CliError::Parse(format!("unknown lemma '{l}'; expected one of {}", known.join(", ")))
                })
            })
            .collect::<CliResult<_>>()?;
    }
    Ok(config)
}

pub fn identity_table(checks: &[IdentityCheck]) -> String {
    let mut out = format!(
        "{:<8} {:<26} {:<16} {:>22} {:>22} {:>10} {:>8}  status\n",
        "identity", "check", "z", "expected", "computed", "deviation", "tol"
    );
    for c in checks {
        let z = c.z.map_or("-".to_string(), |z| format!("{:.3}{:+.3}i", z.re, z.im));
        let computed = c.computed.map_or("-".to_string(), |v| format!("{v:.15e}"));
        out.push_str(&format!(
            "{:<8} {:<26} {:<16} {:>22} {:>22} {:>10.2e} {:>8.0e}  {}\n",
            c.identity.label(),
            c.name,
            z,
            format!("{:.15e}", c.expected),
            computed,
            c.deviation,
            c.tolerance,
            status(c.passed)
        ));
        if let Some(d) = &c.diagnostic {
            out.push_str(&format!("         note: {d}\n"));
        }
    }
    out
}

pub fn cmd_verify_lemmas(opts: &LemmaOptions, flags: &Flags) -> i32 {
    let config = match suite_config(opts, flags) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let checks = run_identity_suite(&config);
    print!("{}", identity_table(&checks));
    if let Some(path) = &flags.out {
        let text = match flags.format {
            Format::Json => to_json(&serde_json::json!({
                "kind": "identity_report",
                "version": REPORT_VERSION,
                "grid": {"n_r": config.grid.0, "n_theta": config.grid.1},
                "checks": checks,
            })),
            Format::Csv => identity_csv(&checks),
        };
        if let Err(e) = emit(Some(path), &text) {
            return fail(e);
        }
    }
    let failures = checks.iter().filter(|c| !c.passed).count();
    if failures == 0 {
        eprintln!("all {} checks pass", checks.len());
        EXIT_OK
    } else {
        eprintln!("{failures} of {} checks failed", checks.len());
        EXIT_CHECK_FAILED
    }
}

pub const EXAMPLES: [&str; 3] = ["example-1.2", "example-1.5", "example-1.6"];

/// Full report for a named fixture.
pub fn run_example(name: &str, flags: &Flags) -> CliResult<RunReport> {
    match name {
        "example-1.6" => {
            let spec = ProblemSpec::from_json(EXAMPLE_1_6)?;
            let opts = RunOptions { defect_k: Some(near_identity::K), ..RunOptions::new(Stage::Certify) };
            run_problem(&spec, "example", name, flags, opts)
        }
        "example-1.5" => {
            let spec = ProblemSpec::from_json(EXAMPLE_1_5)?;
            run_problem(&spec, "example", name, flags, RunOptions::new(Stage::Certify))
        }
        "example-1.2" => {
            let start = Instant::now();
            let (n_r, n_theta) = flags.grid.unwrap_or((16, 32));
            let grid = DiskGrid::new(n_r, n_theta).map_err(|e| CliError::Parse(e.to_string()))?;
            let points: Vec<Complex64> = [(0.3, 0.0), (0.0, 0.5), (-0.4, 0.4), (0.6, -0.2), (0.1, 0.85)]
                .map(|(x, y)| Complex64::new(x, y))
                .into();
            let log_stretch = log_stretch_report(&points)?;
            Ok(RunReport {
                kind: REPORT_KIND,
                version: REPORT_VERSION,
                command: "example".into(),
                source: name.into(),
                n: 2,
                seed: flags.seed.unwrap_or(0),
                grid: GridMeta::of(&grid),
                norms: Vec::new(),
                residuals: None,
                solution: None,
                distortion: None,
                bounds: None,
                certificates: Vec::new(),
                log_stretch: Some(log_stretch),
                timings: Timings { total_s: start.elapsed().as_secs_f64(), ..Timings::default() },
            })
        }
        other => Err(CliError::Parse(format!("unknown example '{other}'; expected one of {}", EXAMPLES.join(", ")))),
    }
}

pub fn cmd_example(name: &str, flags: &Flags) -> i32 {
    let report = match run_example(name, flags) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    if let Err(e) = emit_run(&report, flags, summary_csv) {
        return fail(e);
    }
    describe_run(&report);
    if let Some(ls) = &report.log_stretch {
        eprintln!(
            "log stretch: stencil Laplacian vs 4/zbar deviation {:.3e}; relative bilaplacian {:.3e}",
            ls.laplacian_deviation, ls.bilaplacian_relative
        );
        for (r, q) in &ls.quotients {
            eprintln!("  |z| = {r:.0e}: |f(z) - f(0)|/|z| = {q:.6}");
        }
    }
    residual_exit(&report)
}

/// Parses "RxT".
pub fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (r, t) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected RxT, got '{s}'"))?;
    let r = r.trim().parse().map_err(|_| format!("bad radial count in '{s}'"))?;
    let t = t.trim().parse().map_err(|_| format!("bad angular count in '{s}'"))?;
    Ok((r, t))
}

/// Parses "re,im" or a real number.
pub fn parse_point(s: &str) -> Result<Complex64, String> {
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|_| format!("bad number in '{s}'"));
    match s.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(parse(re)?, parse(im)?)),
        None => Ok(Complex64::new(parse(s)?, 0.0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_and_point_syntax() {
        assert_eq!(parse_grid("64x256"), Ok((64, 256)));
        assert!(parse_grid("64").is_err());
        assert_eq!(parse_point("0.3,0.4"), Ok(Complex64::new(0.3, 0.4)));
        assert_eq!(parse_point("0"), Ok(Complex64::new(0.0, 0.0)));
        assert!(parse_point("a").is_err());
    }

    #[test]
    fn embedded_fixtures_parse() {
        assert_eq!(ProblemSpec::from_json(EXAMPLE_1_5).unwrap().n, 2);
        assert_eq!(ProblemSpec::from_json(EXAMPLE_1_6).unwrap().tolerances.residual, 1e-5);
    }
}
