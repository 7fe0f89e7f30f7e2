use std::f64::consts::PI;
use std::sync::Arc;
use wanalytic::potentials::CentralPotential;
use wanalytic::radial_pde::*;

fn space(outer: f64, cells: usize, degree: usize, dim: usize) -> Arc<FemSpace> {
    space_with_width(outer, cells, degree, dim, 1.0)
}

fn space_with_width(
    outer: f64,
    cells: usize,
    degree: usize,
    dim: usize,
    width: f64,
) -> Arc<FemSpace> {
    let grid = GradedRadialGrid::build(outer, cells, 0.5)
        .unwrap()
        .with_max_width(width)
        .unwrap();
    Arc::new(FemSpace::new(grid, degree, dim).unwrap())
}

#[test]
fn hydrogen_half_kinetic() {
    let s = space(40.0, 20, 6, 3);
    let h = RadialHamiltonian::new(s, 0.5, &CentralPotential::coulomb(1.0), None).unwrap();
    let e = radial_eigensolve(&h, 2).unwrap();
    assert!((e[0].lambda + 0.5).abs() < 1e-8, "{}", e[0].lambda);
    // 2s level
    assert!((e[1].lambda + 0.125).abs() < 1e-7, "{}", e[1].lambda);
    // ground state is exp(-r) / sqrt(pi)
    let err = e[0].field.l2_distance(|r| (-r).exp() / PI.sqrt());
    assert!(err < 1e-6, "{err}");
}

#[test]
fn hydrogen_unit_kinetic() {
    let s = space(60.0, 20, 6, 3);
    let h = RadialHamiltonian::new(s, 1.0, &CentralPotential::coulomb(1.0), None).unwrap();
    let e = radial_eigensolve(&h, 1).unwrap();
    assert!((e[0].lambda + 0.25).abs() < 1e-8, "{}", e[0].lambda);
}

#[test]
fn two_dimensional_hydrogen() {
    // -1/2 Laplace - 1/r in the plane has ground energy -2
    let s = space(20.0, 24, 6, 2);
    let h = RadialHamiltonian::new(s, 0.5, &CentralPotential::coulomb(1.0), None).unwrap();
    let e = radial_eigensolve(&h, 1).unwrap();
    assert!((e[0].lambda + 2.0).abs() < 1e-7, "{}", e[0].lambda);
}

#[test]
fn harmonic_oscillator() {
    let s = space(8.0, 6, 6, 3);
    let h = RadialHamiltonian::new(s, 1.0, &CentralPotential::harmonic(1.0), None).unwrap();
    let e = radial_eigensolve(&h, 2).unwrap();
    assert!((e[0].lambda - 3.0).abs() < 1e-8, "{}", e[0].lambda);
    assert!((e[1].lambda - 7.0).abs() < 1e-7, "{}", e[1].lambda);
}

#[test]
fn eigenvectors_are_normalized_and_positive_at_origin() {
    let s = space(40.0, 20, 5, 3);
    let h = RadialHamiltonian::new(s, 0.5, &CentralPotential::coulomb(2.0), None).unwrap();
    let e = radial_eigensolve(&h, 2).unwrap();
    for p in &e {
        assert!((p.field.l2_norm() - 1.0).abs() < 1e-10);
        assert!(p.field.value(0.0) > 0.0);
    }
}

fn exponential_potential(r: f64) -> f64 {
    // solution of -Laplace u = 4 pi exp(-2r)/pi in R^3
    if r < 1e-4 {
        1.0 - 2.0 * r * r / 3.0 + r * r * r / 3.0
    } else {
        (1.0 - (1.0 + r) * (-2.0 * r).exp()) / r
    }
}

#[test]
fn poisson_matches_closed_form() {
    let s = space_with_width(30.0, 20, 6, 3, 0.25);
    let u = poisson_solve(s, |r| (-2.0 * r).exp() / PI).unwrap();
    for &r in &[0.0, 0.01, 0.3, 1.0, 4.0, 20.0, 30.0] {
        let want = exponential_potential(r);
        assert!(
            (u.value(r) - want).abs() < 1e-9,
            "r={r}: {} vs {want}",
            u.value(r)
        );
    }
}

#[test]
fn poisson_second_order_with_linear_elements() {
    let rho = |r: f64| (-2.0 * r).exp() / PI;
    let mut errs = vec![];
    for &w in &[0.1, 0.05, 0.025] {
        let grid = GradedRadialGrid::build(30.0, 30, 0.5)
            .unwrap()
            .with_max_width(w)
            .unwrap();
        let s = Arc::new(FemSpace::new(grid, 1, 3).unwrap());
        let u = poisson_solve(s, rho).unwrap();
        errs.push(u.l2_distance(exponential_potential));
    }
    for k in 1..errs.len() {
        let order = (errs[k - 1] / errs[k]).log2();
        assert!(order > 1.9, "observed order {order} from {errs:?}");
    }
}

#[test]
fn poisson_residual_small_and_gauss_law() {
    let s = space(30.0, 20, 6, 3);
    let rho_q: Vec<f64> = s
        .quad_points()
        .iter()
        .map(|(r, _)| (-2.0 * r).exp() / PI)
        .collect();
    let solver = PoissonSolver::new(s.clone()).unwrap();
    let u = solver.solve(&rho_q).unwrap();
    assert!(solver.residual(&u, &rho_q) < 1e-10);
    // far field is total charge / r
    let q = s.integrate(&rho_q);
    assert!((q - 1.0).abs() < 1e-12);
    assert!((u.value(30.0) - q / 30.0).abs() < 1e-10);
}

#[test]
fn poisson_two_dimensional_log_far_field() {
    // rho = exp(-r^2)/pi has unit charge; u = -log r - E1(r^2)/2 outside; check
    // u(R) = -2 log R and u'(r) = -2 (1 - exp(-r^2)) / r
    let s = space_with_width(12.0, 20, 6, 2, 0.25);
    let u = poisson_solve(s, |r| (-r * r).exp() / PI).unwrap();
    assert!((u.value(12.0) + 2.0 * 12f64.ln()).abs() < 1e-12);
    for &r in &[0.5f64, 1.0, 3.0] {
        let want = -2.0 * (1.0 - (-r * r).exp()) / r;
        assert!(
            (u.derivative(r) - want).abs() < 1e-6,
            "r={r}: {} vs {want}",
            u.derivative(r)
        );
    }
}

#[test]
fn poisson_rejects_non_decaying_source() {
    let s = space(5.0, 10, 3, 3);
    let err = poisson_solve(s, |r| (-0.1 * r).exp()).unwrap_err();
    assert!(err.to_string().contains("decay"), "{err}");
}

#[test]
fn field_csv_round_trip() {
    let s = space(10.0, 8, 4, 3);
    let f = RadialField::from_fn(s, |r| (-r).exp());
    let text = f.to_csv("phi").unwrap();
    let (meta, g) = RadialField::from_csv(&text).unwrap();
    assert_eq!(meta.name, "phi");
    assert_eq!(f.values, g.values);
}
