use std::f64::consts::FRAC_2_PI;

use polydisk_core::analysis::{distortion_report, wirtinger};
use polydisk_core::bounds::{
    bounds_report, colipschitz_coefficients, corollary_certificates, default_l, kkprime_coefficients,
    lipschitz_coefficients, mori_q_upper, norm_aggregate, Branch, THM_14A, TUE_1, TUE_2,
};
use polydisk_core::fixtures::biharmonic_near_identity;
use polydisk_core::kernels::chordal_power_mean;
use polydisk_core::solver::solve;
use polydisk_core::{DiskGrid, Error, NormProfile};
use proptest::prelude::*;

fn profile(norms: &[f64]) -> NormProfile {
    NormProfile::new(norms.to_vec()).unwrap()
}

fn norms() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.0..2.0f64, 2..5)
}

proptest! {
    #[test]
    fn coefficients_grow_with_every_norm(k in 1.0..3.0f64, base in norms(), idx in 0usize..4, bump in 1e-3..1.0f64) {
        let idx = idx % base.len();
        let mut raised = base.clone();
        raised[idx] += bump;
        let (p, q) = (profile(&base), profile(&raised));
        let (co_p, co_q) = (colipschitz_coefficients(k, &p).unwrap(), colipschitz_coefficients(k, &q).unwrap());
        prop_assert!(co_q.n1 >= co_p.n1);
        prop_assert!(co_q.mu8 >= co_p.mu8);
        prop_assert!(norm_aggregate(&q).unwrap() >= norm_aggregate(&p).unwrap());
        let (lp, lq) = (lipschitz_coefficients(k, &p).unwrap(), lipschitz_coefficients(k, &q).unwrap());
        if lp.branch == lq.branch {
            prop_assert!(lq.n2 >= lp.n2 * (1.0 - 1e-12));
        }
    }

    #[test]
    fn hypothesis_a_gives_a_positive_coefficient(
        k in 1.0..2.0f64,
        kprime in 0.0..0.3f64,
        p0 in 0.0..0.6f64,
        base in proptest::collection::vec(0.0..0.2f64, 2..4),
    ) {
        match kkprime_coefficients(k, kprime, p0, &profile(&base), &default_l) {
            Ok(c) => {
                prop_assert!(c.hypothesis_a);
                prop_assert!(c.part_a_coefficient > 0.0, "{c:?}");
                prop_assert!(c.k_star >= 1.0);
            }
            Err(Error::HypothesisViolated { denominator }) => prop_assert!(denominator <= 0.0),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn lipschitz_bracket_starts_at_one(k in 1.0..4.0f64, base in norms()) {
        let lip = lipschitz_coefficients(k, &profile(&base)).unwrap();
        prop_assert!(lip.c3 >= 1.0);
        let expected = match lip.mu5 {
            Some(mu5) => lip.mu6.min(mu5),
            None => lip.mu6,
        };
        prop_assert_eq!(lip.c3, expected);
    }
}

#[test]
fn identity_limit_constants() {
    let zero = NormProfile::zeros(3).unwrap();
    let lip = lipschitz_coefficients(1.0, &zero).unwrap();
    let co = colipschitz_coefficients(1.0, &zero).unwrap();
    assert_eq!(lip.m2, 1.0);
    assert_eq!(co.m1, 1.0);
    assert_eq!(lip.n2, 0.0);
    assert_eq!(co.n1, 0.0);
    let kk = kkprime_coefficients(1.0, 0.0, 0.0, &zero, &|_| 1.0).unwrap();
    assert_eq!((kk.m3, kk.m4, kk.n3, kk.n4), (1.0, 1.0, 0.0, 0.0));
    assert!((kkprime_coefficients(1.0, 0.0, 0.0, &zero, &default_l).unwrap().m4 - FRAC_2_PI).abs() < 1e-15);
}

#[test]
fn qiu_bound_values() {
    assert_eq!(mori_q_upper(1.0).unwrap(), 1.0);
    // 4·min(√(23/8), √(3/2)).
    assert!((mori_q_upper(2.0).unwrap() - 4.0 * 1.5f64.sqrt()).abs() < 1e-13);
    assert!(matches!(mori_q_upper(0.9), Err(Error::Domain(_))));
    assert!(matches!(mori_q_upper(f64::NAN), Err(Error::Domain(_))));
}

#[test]
fn near_identity_constants() {
    let k = 30.0 / 29.0;
    let p = profile(&[0.2, 16.0 / 15.0]);
    let lip = lipschitz_coefficients(k, &p).unwrap();
    assert_eq!(lip.branch, Branch::Fraction);
    // Oracle: μ₁ from the Gamma closed form of the chordal mean.
    let q = mori_q_upper(k).unwrap();
    let mu1 = k * q.powf(1.0 / k + 1.0) * chordal_power_mean(-0.5 + 0.5 / (k * k)).unwrap();
    let mu2 = (k * 0.1 + k * 16.0 / 15.0 / 16.0) + (7.0 / 6.0 * 0.2 + 47.0 / 240.0 * 16.0 / 15.0);
    let mu5 = (mu1 / k + mu2) / (1.0 - mu1 * (1.0 - 1.0 / k));
    let c3 = (mu1 + mu2).powf(k).min(mu5);
    assert!((lip.mu1 - mu1).abs() < 1e-10 * mu1);
    assert!((lip.c3 - c3).abs() < 1e-10, "C3 = {} vs {c3}", lip.c3);
    assert!((lip.c3 - 1.990714).abs() < 1e-6);
    let certs = corollary_certificates(k, &p).unwrap();
    assert_eq!(certs[0].name, TUE_1);
    assert_eq!(certs[1].name, TUE_2);
    assert!(certs.iter().all(|c| c.passed));
    assert!((certs[1].margin - 0.11963).abs() < 5e-6, "{}", certs[1].margin);
    assert!(certs[1].terms.iter().sum::<f64>() == certs[1].rhs);
}

#[test]
fn report_records_hypothesis_failure_as_a_failed_certificate() {
    let p = profile(&[1.0, 1.0]);
    let report = bounds_report(1.5, 0.0, 0.0, &p, &default_l).unwrap();
    assert!(report.kkprime.is_none());
    let thm = report.certificate(THM_14A).unwrap();
    assert!(!thm.passed && thm.margin < 0.0);
    assert_eq!(report.c2_bracket, (1.0, report.lipschitz.c3));
    assert!(report.rows().iter().any(|(kind, name, _)| *kind == "constant" && name == "Q_upper"));
    assert!(matches!(bounds_report(1.0, -1.0, 0.0, &p, &default_l), Err(Error::Domain(_))));
}

/// A passing tue-2 certificate must be consistent with the sampled lower
/// Lipschitz constant of the computed map.
#[test]
fn passing_certificate_is_sound_for_the_solved_map() {
    let grid = DiskGrid::shared(32, 128).unwrap();
    let problem = biharmonic_near_identity(&grid).unwrap();
    let sol = solve(&problem).unwrap();
    let df = wirtinger(&sol.f).unwrap();
    let d = distortion_report(&sol.f, &df, None, 2000, 20).unwrap();
    let report = bounds_report(d.k_hat, 0.0, 0.0, &problem.norm_profile(), &default_l).unwrap();
    let tue2 = report.certificate(TUE_2).unwrap();
    assert!(tue2.passed);
    assert!(d.lipschitz_lower_hat > report.m1 - report.n1);
    assert!(d.lipschitz_lower_hat > tue2.margin);
    assert!(d.lipschitz_upper_hat < report.c2_bracket.1);
}
