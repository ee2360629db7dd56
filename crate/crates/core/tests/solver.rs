use num_complex::Complex64;
use polydisk_core::fixtures::Polynomial;
use polydisk_core::kernels::green;
use polydisk_core::modal::ModalSeries;
use polydisk_core::quadrature::integrate_disk;
use polydisk_core::solver::{
    green_chain, harmonic_extension, solve, verify_solution, volume_potential, volume_potential_at, Datum,
    PolyharmonicProblem, INTERIOR_BAND,
};
use polydisk_core::{BoundaryFunction, DiskFunction, DiskGrid, Error};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn sum(a: &PolyharmonicProblem, b: &PolyharmonicProblem) -> PolyharmonicProblem {
    let volume = a.volume().add(b.volume()).unwrap();
    let boundary = (0..a.n()).map(|k| a.boundary(k).unwrap().add(b.boundary(k).unwrap()).unwrap()).collect();
    PolyharmonicProblem::new(volume, boundary).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn solve_is_linear(seed_a in 0u64..1000, seed_b in 0u64..1000, re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let grid = DiskGrid::shared(16, 32).unwrap();
        let a = Polynomial::random(seed_a, 4, 5).problem(2, &grid).unwrap();
        let b = Polynomial::random(seed_b, 4, 5).problem(2, &grid).unwrap();
        let alpha = c(re, im);
        let fa = solve(&a).unwrap().f;
        let fb = solve(&b).unwrap().f;
        let scaled = solve(&a.scaled(alpha)).unwrap().f;
        let scale = fa.sup_norm().max(1.0);
        prop_assert!(scaled.max_abs_diff(&fa.scale(alpha)).unwrap() <= 1e-13 * scale * alpha.norm().max(1.0));
        let both = solve(&sum(&a, &b)).unwrap().f;
        prop_assert!(both.max_abs_diff(&fa.add(&fb).unwrap()).unwrap() <= 1e-13 * (scale + fb.sup_norm()));
    }

    #[test]
    fn manufactured_polynomials_round_trip(seed in 0u64..10_000, n in 2usize..=3) {
        let grid = DiskGrid::shared(24, 64).unwrap();
        let poly = Polynomial::random(seed, 2 * n as u32, 7);
        let sol = solve(&poly.problem(n, &grid).unwrap()).unwrap();
        let err = sol.f.max_error_against(|z| poly.eval(z));
        prop_assert!(err < 1e-10, "error {err:e}");
        prop_assert!(sol.bookkeeping_error() < 1e-12);
        let residuals = verify_solution(&sol, 1e-6).unwrap();
        prop_assert!(residuals.passed, "{residuals:?}");
    }
}

#[test]
fn volume_potential_inverts_the_negative_laplacian() {
    let grid = DiskGrid::shared(32, 64).unwrap();
    let g = DiskFunction::from_fn(grid.clone(), |z| (z * c(0.7, 0.2)).exp() + z.conj().powu(3)).unwrap();
    let v = volume_potential(&g);
    assert!(v.boundary_trace().sup_norm() < 1e-12);
    let lap = ModalSeries::fit(&v).chopped(1e-13).laplacian().to_disk_function().unwrap();
    let mut worst: f64 = 0.0;
    for (i, &r) in grid.radial_nodes().iter().enumerate() {
        if r > INTERIOR_BAND.0 && r < INTERIOR_BAND.1 {
            for j in 0..grid.n_theta() {
                worst = worst.max((lap.value(i, j) + g.value(i, j)).norm());
            }
        }
    }
    // Default residual tolerance: differentiating the fit sets the floor.
    assert!(worst < 1e-6, "{worst:e}");
}

#[test]
fn green_chain_matches_nested_integrals() {
    let grid = DiskGrid::shared(24, 64).unwrap();
    let oracle = DiskGrid::new(16, 64).unwrap();
    let g = DiskFunction::from_fn(grid.clone(), |z| c(1.0, 0.0) + z * z.conj() + c(0.0, 2.0) * z.powu(2)).unwrap();
    let chain = green_chain(1, Datum::Volume(&g), &grid).unwrap();
    let phi = BoundaryFunction::from_modes(64, [(1, c(1.0, 0.0))]).unwrap();
    let from_boundary = green_chain(1, Datum::Boundary(&phi), &grid).unwrap();
    for z in [c(0.0, 0.0), c(0.3, -0.2), c(-0.5, 0.6), c(0.85, 0.1)] {
        let direct = volume_potential_at(&g, z).unwrap();
        assert!((chain.eval(z) - direct.value).norm() < 1e-8, "z = {z}");
        let nested = integrate_disk(|s| if s == z { c(0.0, 0.0) } else { s * green(z, s).unwrap() }, &oracle, Some(z))
            .unwrap()
            .value;
        // Closed form: V[ζ](z) = z(1 − |z|²)/8.
        let exact = z * (1.0 - z.norm_sqr()) / 8.0;
        assert!((nested - exact).norm() < 1e-8);
        assert!((from_boundary.eval(z) - exact).norm() < 1e-10);
    }
}

#[test]
fn biharmonic_example_verifies() {
    // Re(z³) + (1 − |z|²)².
    let mut poly = Polynomial::monomial(3, 0, c(0.5, 0.0));
    poly.add_term(0, 3, c(0.5, 0.0));
    poly.add_term(0, 0, c(1.0, 0.0));
    poly.add_term(1, 1, c(-2.0, 0.0));
    poly.add_term(2, 2, c(1.0, 0.0));
    let grid = DiskGrid::shared(32, 128).unwrap();
    let sol = solve(&poly.problem(2, &grid).unwrap()).unwrap();
    let report = verify_solution(&sol, 1e-6).unwrap();
    assert!(report.passed && report.warning.is_none(), "{report:?}");
    assert!(report.max_residual() < 1e-6);
    assert!(sol.components_within_bounds());
    assert!(sol.f.max_error_against(|z| poly.eval(z)) < 1e-12);
}

#[test]
fn component_bounds_hold_for_constant_data() {
    let grid = DiskGrid::shared(32, 64).unwrap();
    let volume = DiskFunction::from_fn(grid.clone(), |_| c(1.0, 0.0)).unwrap();
    let boundary = (0..3).map(|_| BoundaryFunction::constant(64, c(1.0, 0.0)).unwrap()).collect();
    let sol = solve(&PolyharmonicProblem::new(volume, boundary).unwrap()).unwrap();
    assert_eq!(sol.component_checks.len(), 3);
    for check in &sol.component_checks {
        assert!(check.within, "{check:?}");
    }
    // G₁[1] = (1 − |z|²)/4 attains its bound at the origin.
    let g1 = &sol.component_checks[0];
    assert!((g1.sup - 0.25).abs() < 1e-3);
}

#[test]
fn harmonic_extension_reproduces_modes() {
    let grid = DiskGrid::shared(16, 32).unwrap();
    let phi = BoundaryFunction::from_modes(32, [(2, c(1.0, 0.0)), (-3, c(0.0, 1.0))]).unwrap();
    let u = harmonic_extension(&phi, &grid).unwrap();
    assert!(u.max_error_against(|z| z * z + c(0.0, 1.0) * z.conj().powu(3)) < 1e-13);
}

#[test]
fn invalid_requests_are_errors() {
    let grid = DiskGrid::shared(8, 16).unwrap();
    let other = DiskGrid::shared(8, 32).unwrap();
    let g = DiskFunction::zero(grid.clone()).unwrap();
    assert!(matches!(green_chain(0, Datum::Volume(&g), &grid), Err(Error::Index { .. })));
    assert!(matches!(green_chain(1, Datum::Volume(&g), &other), Err(Error::GridMismatch(_))));
    let one = vec![BoundaryFunction::zero(16).unwrap()];
    assert!(PolyharmonicProblem::new(g.clone(), one).is_err());
}
