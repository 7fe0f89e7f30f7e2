mod common;

use std::f64::consts::PI;
use wanalytic::potentials::PotentialSpec;
use wanalytic::scf::*;

fn coulomb(z: f64) -> PotentialSpec {
    PotentialSpec::Coulomb {
        charges: vec![z],
        centers: vec![vec![0.0; 3]],
    }
}

fn one_orbital(z: f64, c: f64, t: f64) -> SystemSpec {
    SystemSpec {
        orbitals: 1,
        coupling: vec![CouplingEntry {
            orbital: 0,
            partner: 0,
            a: 0,
            b: 0,
            value: c,
        }],
        potential: coulomb(z),
        kinetic: t,
        dim: 3,
    }
}

#[test]
fn shooting_oracle_reproduces_hydrogen() {
    let lam = common::shooting_hartree(1.0, 0.0, 0.5, 30.0, 60_000);
    assert!((lam + 0.5).abs() < 1e-7, "{lam}");
}

#[test]
fn uncoupled_hydrogen_in_one_step() {
    let spec = one_orbital(1.0, 0.0, 0.5);
    let state = scf_solve(&spec, &ScfConfig::default()).unwrap();
    assert!(state.converged);
    assert!(state.iterations <= 1, "{}", state.iterations);
    assert!((state.lambdas[0] + 0.5).abs() < 1e-8);
    // pair potential of e^{-r}/sqrt(pi) is (1-(1+r)e^{-2r})/r with sup 1 at 0
    let sup = uab_sup_norm(&state);
    assert!((sup - 1.0).abs() < 1e-7, "{sup}");
    let u = state.pair_potential(0, 0);
    for &r in &[0.5f64, 2.0] {
        let want = (1.0 - (1.0 + r) * (-2.0 * r).exp()) / r;
        assert!((u.value(r) - want).abs() < 1e-7);
    }
}

#[test]
fn weak_coupling_with_full_mixing_converges_fast() {
    let spec = one_orbital(1.0, 1e-3, 0.5);
    let cfg = ScfConfig {
        mixing: 1.0,
        tolerance: 1e-8,
        ..ScfConfig::default()
    };
    let state = scf_solve(&spec, &cfg).unwrap();
    assert!(
        state.converged && state.iterations <= 5,
        "{:?}",
        state.history
    );
    assert!(state.residuals.max() < 1e-8);
}

#[test]
fn helium_type_model_matches_shooting() {
    let spec = one_orbital(2.0, 2.0, 0.5);
    let state = scf_solve(
        &spec,
        &ScfConfig {
            tolerance: 1e-9,
            ..ScfConfig::default()
        },
    )
    .unwrap();
    assert!(state.converged, "{:?}", state.history);
    let oracle = common::shooting_hartree(2.0, 2.0, 0.5, 30.0, 60_000);
    assert!(
        (state.lambdas[0] - oracle).abs() < 1e-5,
        "{} vs {oracle}",
        state.lambdas[0]
    );
    // normalization and positivity of the self potential
    assert!((state.orbitals[0].l2_norm() - 1.0).abs() < 1e-12);
    assert!(state.potentials[0].values.iter().all(|v| *v >= 0.0));
    // one more sweep leaves lambda in place
    let again = scf_sweep(&state, &spec).unwrap();
    assert!((again[0] - state.lambdas[0]).abs() < 1e-8);
    let summary = state.summary(spec.kinetic);
    assert!(summary.tail_estimate < 1e-10, "{}", summary.tail_estimate);
}

#[test]
fn residual_grows_linearly_with_perturbation() {
    let spec = one_orbital(2.0, 2.0, 0.5);
    let state = scf_solve(&spec, &ScfConfig::default()).unwrap();
    let mut out = vec![];
    for &eps in &[1e-4, 2e-4, 4e-4] {
        let mut s = state.clone();
        let nodes = s.space().node_coords();
        for (v, r) in s.orbitals[0].values.iter_mut().zip(nodes) {
            *v += eps * (-r * r).exp();
        }
        out.push(scf_residual(&s, &spec).unwrap().orbital[0]);
    }
    let r1 = out[1] / out[0];
    let r2 = out[2] / out[1];
    assert!(
        (r1 - 2.0).abs() < 0.05 && (r2 - 2.0).abs() < 0.05,
        "{out:?}"
    );
}

#[test]
fn two_orbitals_with_exchange_like_coupling() {
    // orbital 0 feels c u_01 phi_1 and vice versa; both feel the total density
    let mut coupling = vec![];
    for i in 0..2 {
        for a in 0..2 {
            coupling.push(CouplingEntry {
                orbital: i,
                partner: i,
                a,
                b: a,
                value: 1.0,
            });
        }
        let j = 1 - i;
        coupling.push(CouplingEntry {
            orbital: i,
            partner: j,
            a: i,
            b: j,
            value: -0.5,
        });
    }
    let spec = SystemSpec {
        orbitals: 2,
        coupling,
        potential: coulomb(3.0),
        kinetic: 0.5,
        dim: 3,
    };
    let state = scf_solve(&spec, &ScfConfig::default()).unwrap();
    assert!(state.converged, "{:?}", state.history);
    assert!(state.lambdas[0] < state.lambdas[1]);
    for phi in &state.orbitals {
        assert!((phi.l2_norm() - 1.0).abs() < 1e-12);
    }
    // u_01 = u_10 by storage
    assert!(std::ptr::eq(
        state.pair_potential(0, 1),
        state.pair_potential(1, 0)
    ));
    let res = scf_residual(&state, &spec).unwrap();
    assert!(res.max() < 1e-8, "{res:?}");
}

#[test]
fn scaled_density_doubles_potential() {
    use std::sync::Arc;
    use wanalytic::radial_pde::*;
    let grid = GradedRadialGrid::build(30.0, 24, 0.5)
        .unwrap()
        .with_max_width(0.5)
        .unwrap();
    let s = Arc::new(FemSpace::new(grid, 6, 3).unwrap());
    let u1 = poisson_solve(s.clone(), |r| (-2.0 * r).exp() / PI).unwrap();
    let u2 = poisson_solve(s, |r| 2.0 * (-2.0 * r).exp() / PI).unwrap();
    assert!((u2.max_abs() - 2.0 * u1.max_abs()).abs() < 1e-12);
}

#[test]
fn invalid_specs_are_rejected() {
    let mut spec = one_orbital(1.0, 1.0, 0.5);
    spec.coupling[0].a = 3;
    assert!(scf_solve(&spec, &ScfConfig::default())
        .unwrap_err()
        .is_usage());
    let spec = one_orbital(1.0, 1.0, 0.5);
    let cfg = ScfConfig {
        mixing: 0.0,
        ..ScfConfig::default()
    };
    assert!(scf_solve(&spec, &cfg).unwrap_err().is_usage());
}

#[test]
fn outputs_are_deterministic() {
    let spec = one_orbital(2.0, 2.0, 0.5);
    let a = scf_solve(&spec, &ScfConfig::default()).unwrap();
    let b = scf_solve(&spec, &ScfConfig::default()).unwrap();
    assert_eq!(a.orbitals_csv(), b.orbitals_csv());
    assert_eq!(a.potentials_csv(), b.potentials_csv());
    let ja = serde_json::to_string(&a.summary(0.5)).unwrap();
    assert_eq!(ja, serde_json::to_string(&b.summary(0.5)).unwrap());
}
