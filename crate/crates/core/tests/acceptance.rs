//! One pass/fail line per acceptance criterion. Exits nonzero if any fails.

mod common;

use std::f64::consts::{E, PI};
use std::sync::Arc;
use std::time::{Duration, Instant};
use wanalytic::combinatorics::*;
use wanalytic::functions::PowerExp;
use wanalytic::potentials::{CentralPotential, PotentialSpec};
use wanalytic::radial_pde::*;
use wanalytic::scf::*;
use wanalytic::verify::constants::lemma_constants;
use wanalytic::verify::elliptic::elliptic_quadrature;
use wanalytic::verify::*;
use wanalytic::weights::QuadratureOptions;
use wanalytic::Result;

struct Outcome {
    pass: bool,
    detail: String,
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn space(outer: f64, cells: usize, degree: usize, width: f64) -> Result<Arc<FemSpace>> {
    let grid = GradedRadialGrid::build(outer, cells, 0.5)?.with_max_width(width)?;
    Ok(Arc::new(FemSpace::new(grid, degree, 3)?))
}

fn exact_linear_cases() -> Result<Outcome> {
    let (hydrogen, t_h) = timed(|| -> Result<_> {
        let s = space(40.0, 20, 6, 1.0)?;
        let nodes = s.n_dofs();
        let h = RadialHamiltonian::new(s, 0.5, &CentralPotential::coulomb(1.0), None)?;
        let e = radial_eigensolve(&h, 1)?;
        let err = e[0].field.l2_distance(|r| (-r).exp() / PI.sqrt());
        Ok((e[0].lambda, err, nodes))
    });
    let (osc, t_o) = timed(|| -> Result<_> {
        let s = space(8.0, 6, 6, 1.0)?;
        let h = RadialHamiltonian::new(s, 1.0, &CentralPotential::harmonic(1.0), None)?;
        Ok(radial_eigensolve(&h, 1)?[0].lambda)
    });
    let ((lambda, err, nodes), osc) = (hydrogen?, osc?);
    let pass = (lambda + 0.5).abs() <= 1e-6
        && err <= 1e-5
        && nodes <= 4000
        && (osc - 3.0).abs() <= 1e-5
        && t_h.as_secs_f64() < 10.0
        && t_o.as_secs_f64() < 10.0;
    Ok(Outcome {
        pass,
        detail: format!(
            "hydrogen |lambda+0.5| = {:.2e}, L2 error {:.2e}, {nodes} nodes, {:.2}s; oscillator |lambda-3| = {:.2e}, {:.2}s",
            (lambda + 0.5).abs(),
            err,
            t_h.as_secs_f64(),
            (osc - 3.0).abs(),
            t_o.as_secs_f64()
        ),
    })
}

fn hartree_of_exponential(r: f64) -> f64 {
    if r < 1e-4 {
        1.0 - 2.0 * r * r / 3.0 + r * r * r / 3.0
    } else {
        (1.0 - (1.0 + r) * (-2.0 * r).exp()) / r
    }
}

fn poisson_oracle() -> Result<Outcome> {
    let rho = |r: f64| (-2.0 * r).exp() / PI;
    let s = space(30.0, 20, 6, 0.25)?;
    let u = poisson_solve(s.clone(), rho)?;
    let mut samples = s.node_coords();
    samples.extend((0..=3000).map(|i| 30.0 * i as f64 / 3000.0));
    let max_rel = samples
        .iter()
        .map(|&r| {
            let want = hartree_of_exponential(r);
            (u.value(r) - want).abs() / want.abs()
        })
        .fold(0.0, f64::max);
    let mut errs = Vec::new();
    for w in [0.1, 0.05, 0.025] {
        let s = Arc::new(FemSpace::new(
            GradedRadialGrid::build(30.0, 30, 0.5)?.with_max_width(w)?,
            1,
            3,
        )?);
        errs.push(poisson_solve(s, rho)?.l2_distance(hartree_of_exponential));
    }
    let order = errs
        .windows(2)
        .map(|e| (e[0] / e[1]).log2())
        .fold(f64::INFINITY, f64::min);
    Ok(Outcome {
        pass: max_rel <= 1e-6 && order >= 1.9,
        detail: format!("max relative error {max_rel:.2e}, observed order {order:.3}"),
    })
}

fn helium_type() -> SystemSpec {
    SystemSpec {
        orbitals: 1,
        coupling: vec![CouplingEntry {
            orbital: 0,
            partner: 0,
            a: 0,
            b: 0,
            value: 2.0,
        }],
        potential: PotentialSpec::Coulomb {
            charges: vec![2.0],
            centers: vec![vec![0.0; 3]],
        },
        kinetic: 0.5,
        dim: 3,
    }
}

fn scf_config() -> ScfConfig {
    ScfConfig {
        tolerance: 1e-9,
        ..ScfConfig::default()
    }
}

fn scf_cross_check() -> Result<Outcome> {
    let state = scf_solve(&helium_type(), &scf_config())?;
    let oracle = common::shooting_hartree(2.0, 2.0, 0.5, 30.0, 60_000);
    let res = state.residuals.max();
    let diff = (state.lambdas[0] - oracle).abs();
    Ok(Outcome {
        pass: state.converged && res < 1e-8 && diff <= 1e-5,
        detail: format!(
            "lambda {:.10}, shooting {oracle:.10}, |diff| {diff:.2e}, residual {res:.2e}, {} iterations",
            state.lambdas[0], state.iterations
        ),
    })
}

fn main_envelope() -> Result<Outcome> {
    let params = EnvelopeParams::default();
    let (study, t) = timed(|| envelope_study(&helium_type(), &scf_config(), &params));
    let study = study?;
    Ok(Outcome {
        pass: study.pass,
        detail: format!(
            "eta {}, orders <= {}, A base {:.4} / doubled radii {:.4} / refined grid {:.4} (tolerance {:.0}%), {:.2}s; {}",
            params.eta,
            params.alpha_max,
            study.base.a,
            study.doubled.a,
            study.refined.a,
            100.0 * envelope::ENVELOPE_STABILITY,
            t.as_secs_f64(),
            study.scope
        ),
    })
}

fn inequality_suites() -> Result<Outcome> {
    let (interp, t_i) = timed(|| {
        interpolation_suite(
            &InterpolationParams::default(),
            &QuadratureOptions::default(),
        )
    });
    let interp = interp?;
    let (ell, t_e) = timed(|| {
        elliptic_suite(
            &manufactured_suite(),
            &EllipticParams::default(),
            &elliptic_quadrature(),
        )
    });
    let ell = ell?;
    let (imb, t_b) = timed(|| imbedding_suite(&ImbeddingParams::default(), &elliptic_quadrature()));
    let imb = imb?;
    let c_interp = interp.values["c_interp"];
    let c_reg = ell.values["c_reg"];
    let slow = [t_i, t_e, t_b].iter().any(|t| t.as_secs_f64() >= 60.0);
    Ok(Outcome {
        pass: interp.pass
            && c_interp.is_finite()
            && ell.pass
            && c_reg.is_finite()
            && c_reg >= 1.0
            && imb.pass
            && !slow,
        detail: format!(
            "C_interp {c_interp:.5} (extension max {:.5}, {:.1}s); C_reg {c_reg:.3} (max ratio {:.4}, {:.1}s); imbedding fitted {:.4} over {} instances ({:.1}s)",
            interp.values["extension_max_ratio"],
            t_i.as_secs_f64(),
            ell.max_ratio,
            t_e.as_secs_f64(),
            imb.fitted_constant,
            imb.values["instances"],
            t_b.as_secs_f64()
        ),
    })
}

fn exact_combinatorics() -> Outcome {
    let kato = (1..=3).all(|d| {
        (0..=8).all(|k| {
            MultiIndex::of_order(d, k)
                .iter()
                .all(|a| (0..=k).all(|i| kato_sum(a, i) == binom(k, i)))
        })
    });
    let (j_max, s_max) = riemann_sqrt_sum_max(100_000);
    let riemann = s_max <= PI;
    let fib = (0..=90).all(fibonacci_golden_bound_exact);
    let stirling = (1..=20).all(|n| stirling_holds_exact(n).unwrap_or(false));
    Outcome {
        pass: kato && riemann && fib && stirling,
        detail: format!(
            "Kato {kato}; max riemann sum {s_max:.6} at j = {j_max}; Fibonacci {fib}; Stirling {stirling}"
        ),
    }
}

fn constant_arithmetic() -> Result<Outcome> {
    let l = lemma_constants(1.0, 1.0, 1.0, 3, 6.0, 1.0)?;
    let c1 = 8.0 * (5.0f64 / 3.0).exp() + 8.0 * (4.0 * PI).powf(1.0 / 6.0) * (1.0f64 / 3.0).exp();
    let c4 = E / (2.0 * (2.0 * PI).sqrt()) + 4.0 * PI * E + 1.0;
    let e1 = (l.c_1.value - c1).abs() / c1;
    let e4 = (l.c_4.value - c4).abs() / c4;
    let theta_ok = (l.theta - 1.0 / 3.0).abs() < 1e-15;
    let grid = SequenceGrid::default();
    let reports = sequence_grid_suite(&grid)?;
    let failing: Vec<&str> = reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| r.lemma.as_str())
        .collect();
    let points = reports.first().map_or(0.0, |r| r.values["points"]);
    Ok(Outcome {
        pass: e1 <= 1e-12 && e4 <= 1e-12 && theta_ok && failing.is_empty() && !reports.is_empty(),
        detail: format!(
            "C_1 rel error {e1:.1e}, C_4 rel error {e4:.1e}, theta {:.15}; sequence grid k <= {}: {} lemmas over {points} points, failing {failing:?}",
            l.theta,
            grid.k_max,
            reports.len()
        ),
    })
}

fn hp_demo() -> Result<Outcome> {
    let c = hp_comparison(&PowerExp::new(1.0, 0.5, 1.0), &HpParams::default())?;
    Ok(Outcome {
        pass: c.pass() && c.geometric.sqrt_fit.slope < 0.0,
        detail: format!(
            "geometric: slope {:.3} in sqrt(DOF), correlation {:.5}; uniform: log-log correlation {:.5} vs sqrt(DOF) correlation {:.5}",
            c.geometric.sqrt_fit.slope,
            c.geometric.sqrt_fit.correlation,
            c.uniform.log_fit.correlation,
            c.uniform.sqrt_fit.correlation
        ),
    })
}

fn main() {
    let criteria: Vec<(&str, Box<dyn Fn() -> Result<Outcome>>)> = vec![
        ("exact linear cases", Box::new(exact_linear_cases)),
        ("Poisson oracle", Box::new(poisson_oracle)),
        ("SCF cross-check", Box::new(scf_cross_check)),
        ("main envelope", Box::new(main_envelope)),
        ("inequality suites", Box::new(inequality_suites)),
        (
            "exact combinatorics",
            Box::new(|| Ok(exact_combinatorics())),
        ),
        ("constant arithmetic", Box::new(constant_arithmetic)),
        ("hp demo", Box::new(hp_demo)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (outcome, t) = timed(run);
        let (pass, detail) = match outcome {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "[{}] {}. {name}: {detail} [{:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            t.as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
