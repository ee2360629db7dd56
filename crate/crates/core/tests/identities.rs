use num_complex::Complex64;
use polydisk_core::identities::{run_identity_suite, Identity, SuiteConfig};

#[test]
fn default_suite_passes() {
    let checks = run_identity_suite(&SuiteConfig::default());
    let failed: Vec<_> = checks.iter().filter(|c| !c.passed).collect();
    assert!(failed.is_empty(), "{failed:#?}");
    for id in Identity::ALL {
        assert!(checks.iter().any(|c| c.identity == id), "{id:?} missing");
        assert_eq!(Identity::from_label(id.label()), Some(id));
    }
}

#[test]
fn coarse_grid_fails_with_a_diagnostic() {
    let config =
        SuiteConfig { grid: (2, 4), points: vec![Complex64::new(0.5, 0.0)], identities: vec![Identity::GreenMoments] };
    let checks = run_identity_suite(&config);
    assert!(checks.iter().any(|c| !c.passed && c.diagnostic.is_some()));
}

#[test]
fn points_outside_the_disk_are_reported_not_panicked() {
    let config = SuiteConfig {
        grid: (8, 16),
        points: vec![Complex64::new(1.5, 0.0)],
        identities: vec![Identity::WeightedSingular],
    };
    let checks = run_identity_suite(&config);
    assert!(!checks.is_empty() && checks.iter().all(|c| !c.passed && c.computed.is_none()));
}
