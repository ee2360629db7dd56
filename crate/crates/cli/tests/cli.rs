use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use num_complex::Complex64;
use polydisk_cli::expr::Expr;
use proptest::prelude::*;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn polydisk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polydisk")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const SMALL: &str = r#"{
    "version": 1, "n": 2,
    "phi_volume": {"expr": "-16/15"},
    "phi_boundary": [{"fourier": [{"m": 1, "re": 1}]}, {"expr": "-1/5"}],
    "grid": {"n_r": 24, "n_theta": 64},
    "seed": 4
}"#;

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn malformed_and_unknown_fields_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{ not json");
    let out_path = dir.path().join("never.json");
    let out = polydisk(&["solve", bad.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(!out_path.exists());
    let extra = write(dir.path(), "extra.json", &SMALL.replacen("\"n\": 2", "\"n\": 2, \"colour\": 3", 1));
    let out = polydisk(&["solve", extra.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
    assert_eq!(code(&polydisk(&["solve", "--grid", "64by256", extra.to_str().unwrap()])), 2);
}

#[test]
fn zero_problem_solves() {
    let out = polydisk(&["solve", fixture("zero.json").to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert_eq!(report["kind"], "run_report");
    assert!(report["residuals"]["passed"].as_bool().unwrap());
}

#[test]
fn missing_input_is_a_runtime_failure() {
    assert_eq!(code(&polydisk(&["solve", "/nonexistent/problem.json"])), 1);
}

#[test]
fn reports_are_deterministic_apart_from_timings() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "small.json", SMALL);
    let run = || {
        let out = polydisk(&["analyze", spec.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
        let mut v = json(&out);
        v.as_object_mut().unwrap().remove("timings");
        serde_json::to_string(&v).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn output_is_written_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "small.json", SMALL);
    let target = dir.path().join("report.csv");
    let out = polydisk(&["solve", spec.to_str().unwrap(), "--format", "csv", "--out", target.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&target).unwrap();
    assert!(text.starts_with("r,theta,re,im\n"));
    assert_eq!(text.lines().count(), 1 + 24 * 64);
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 2, "no temporary files left: {names:?}");
    let unwritable = dir.path().join("missing/dir/report.json");
    let out = polydisk(&["solve", spec.to_str().unwrap(), "--out", unwritable.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
}

#[test]
fn certify_exit_codes() {
    let out = polydisk(&["certify", fixture("example-1.6.json").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    let tue2 = report["bounds"]["certificates"].as_array().unwrap().iter().find(|c| c["name"] == "tue-2").unwrap();
    assert!(tue2["margin"].as_f64().unwrap() > 0.12);

    assert_eq!(code(&polydisk(&["certify", fixture("example-1.5.json").to_str().unwrap()])), 6);
    assert_eq!(code(&polydisk(&["certify", "--k", "1", "--norms", "0,0", "--certificate", "all"])), 0);
    assert_eq!(code(&polydisk(&["certify", "--k", "1.5", "--norms", "1,1", "--certificate", "thm-1.4a"])), 5);
    assert_eq!(code(&polydisk(&["certify", "--k", "1.5", "--norms", "1,1", "--certificate", "tue-2"])), 6);
    assert_eq!(code(&polydisk(&["certify", "--norms", "0,0"])), 2);
    assert_eq!(code(&polydisk(&["certify", "--k", "0.5", "--norms", "0,0"])), 2);
}

#[test]
fn certify_accepts_a_run_report() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "small.json", SMALL);
    let report = dir.path().join("run.json");
    assert_eq!(code(&polydisk(&["analyze", spec.to_str().unwrap(), "--out", report.to_str().unwrap()])), 0);
    let out = polydisk(&["certify", report.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("kind,name,value\n"));
    assert!(text.lines().any(|l| l.starts_with("margin,tue-2,")));
}

#[test]
fn lemma_suite() {
    assert_eq!(code(&polydisk(&["verify-lemmas"])), 0);
    let out = polydisk(&["verify-lemmas", "--z", "0", "--lemma", "2.2"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("5.333333333333333e-1"));
    assert_eq!(code(&polydisk(&["verify-lemmas", "--grid", "8x16"])), 3);
    assert_eq!(code(&polydisk(&["verify-lemmas", "--lemma", "9.9"])), 2);
    assert_eq!(code(&polydisk(&["verify-lemmas", "--z", "2,0"])), 3);
}

#[test]
fn examples_replay() {
    let out = polydisk(&["example", "example-1.6"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert!((report["distortion"]["k_hat"].as_f64().unwrap() - 30.0 / 29.0).abs() < 1e-3);
    let out = polydisk(&["example", "example-1.2"]);
    assert_eq!(code(&out), 0);
    assert!(json(&out)["log_stretch"].is_object());
    assert_eq!(code(&polydisk(&["example", "example-9"])), 2);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn expressions_match_direct_evaluation(
        a in -9i32..10, b in -9i32..10, d in 1i32..10, p in 0u32..5, q in 0u32..5, re in -0.9..0.9f64, im in -0.9..0.9f64,
    ) {
        let src = format!("{a}*z^{p}*zbar^{q} + ({b}/{d})*|z|^2 - i");
        let e = Expr::parse(&src).unwrap();
        let z = Complex64::new(re, im);
        let direct = f64::from(a) * z.powu(p) * z.conj().powu(q) + f64::from(b) / f64::from(d) * z.norm_sqr()
            - Complex64::i();
        prop_assert!((e.eval(z) - direct).norm() < 1e-12, "{src}");
    }
}
