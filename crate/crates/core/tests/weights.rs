use proptest::prelude::*;
use std::f64::consts::PI;
use wanalytic::combinatorics::MultiIndex;
use wanalytic::functions::{PowerExp, Radial};
use wanalytic::weights::*;
use wanalytic::Error;

/// int_0^R r^n exp(-2r) dr in closed form.
fn exp_moment(n: u32, r: f64) -> f64 {
    let fact = |k: u32| (1..=k).map(|i| i as f64).product::<f64>();
    let tail: f64 = (0..=n).map(|k| (2.0 * r).powi(k as i32) / fact(k)).sum();
    fact(n) / 2f64.powi(n as i32 + 1) * (1.0 - (-2.0 * r).exp() * tail)
}

fn cusp() -> Radial<PowerExp> {
    Radial::new(PowerExp::cusp(1.0), 3)
}

fn opts() -> QuadratureOptions {
    QuadratureOptions::default()
}

#[test]
fn order_zero_matches_closed_form() {
    let s = weighted_seminorm(
        &cusp(),
        &WeightSpec {
            p: 2.0,
            gamma: 0.0,
            order: 0,
        },
        RadialRegion::ball(1.0),
        &opts(),
    )
    .unwrap();
    let exact = (4.0 * PI * exp_moment(2, 1.0)).sqrt();
    assert!((s - exact).abs() < 1e-12 * exact, "{s} vs {exact}");
}

#[test]
fn order_one_matches_gradient_integral() {
    // sum_i ||r^{1/2} d_i e^{-r}||^2 = 4 pi int r e^{-2r} r^2 dr
    let s = weighted_seminorm(
        &cusp(),
        &WeightSpec {
            p: 2.0,
            gamma: 0.5,
            order: 1,
        },
        RadialRegion::ball(2.0),
        &opts(),
    )
    .unwrap();
    let exact = (4.0 * PI * exp_moment(3, 2.0)).sqrt();
    assert!((s - exact).abs() < 1e-12 * exact);
}

#[test]
fn order_two_matches_hessian_integral() {
    // with A = g'', B = g'/r the multi-index sum of squared second derivatives
    // integrates over the sphere to 4 pi (3B^2 + 2B(A-B) + 4/5 (A-B)^2);
    // times r^{2(2-gamma)} r^2 with gamma = 1 this is
    // 4 pi e^{-2r} (4/5 r^4 - 2/5 r^3 + 9/5 r^2)
    let s = weighted_seminorm(
        &cusp(),
        &WeightSpec {
            p: 2.0,
            gamma: 1.0,
            order: 2,
        },
        RadialRegion::ball(1.0),
        &opts(),
    )
    .unwrap();
    let exact = (4.0
        * PI
        * (0.8 * exp_moment(4, 1.0) - 0.4 * exp_moment(3, 1.0) + 1.8 * exp_moment(2, 1.0)))
    .sqrt();
    assert!((s - exact).abs() < 1e-10 * exact, "{s} vs {exact}");
}

#[test]
fn sup_norm_of_gradient() {
    // sup r^{1/2} |d_i e^{-r}| = sup r^{1/2} e^{-r} |w_i|, attained on an axis at r = 1/2
    let s = weighted_seminorm(
        &cusp(),
        &WeightSpec {
            p: f64::INFINITY,
            gamma: 0.5,
            order: 1,
        },
        RadialRegion::ball(1.0),
        &opts(),
    )
    .unwrap();
    let exact = 0.5f64.sqrt() * (-0.5f64).exp();
    assert!(
        s <= exact * (1.0 + 1e-12) && s > 0.98 * exact,
        "{s} vs {exact}"
    );
}

#[test]
fn divergent_weight_is_reported() {
    // |e^{-r}|^2 r^{-2 gamma} r^2 is not integrable for gamma = 1.6
    let err = weighted_seminorm(
        &cusp(),
        &WeightSpec {
            p: 2.0,
            gamma: 1.6,
            order: 0,
        },
        RadialRegion::ball(1.0),
        &opts(),
    );
    assert!(matches!(err, Err(Error::Divergent(_))));
    // cusp: second derivatives behave like 1/r, so r^{2-gamma} r^{-1} with gamma = 2.6
    let err = weighted_seminorm(
        &cusp(),
        &WeightSpec {
            p: 2.0,
            gamma: 2.6,
            order: 2,
        },
        RadialRegion::ball(1.0),
        &opts(),
    );
    assert!(matches!(err, Err(Error::Divergent(_))));
    // annuli never diverge
    assert!(weighted_seminorm(
        &cusp(),
        &WeightSpec {
            p: 2.0,
            gamma: 2.6,
            order: 2
        },
        dyadic_annulus(3, 1.0),
        &opts()
    )
    .is_ok());
}

#[test]
fn ball_equals_dyadic_decomposition() {
    let f = Radial::new(PowerExp::new(1.0, 0.5, 2.0), 3);
    for &(p, gamma, k) in &[(2.0, 1.0, 1u32), (3.0, 0.5, 2), (f64::INFINITY, 0.4, 1)] {
        let spec = WeightSpec { p, gamma, order: k };
        let ball = weighted_seminorm(&f, &spec, RadialRegion::ball(1.0), &opts()).unwrap();
        let levels = 6;
        let mut parts: Vec<f64> = (0..levels)
            .map(|j| weighted_seminorm(&f, &spec, dyadic_annulus(j, 1.0), &opts()).unwrap())
            .collect();
        parts.push(
            weighted_seminorm(
                &f,
                &spec,
                RadialRegion::ball(0.5f64.powi(levels as i32)),
                &opts(),
            )
            .unwrap(),
        );
        let agg = aggregate(&parts, p);
        let tol = if p.is_infinite() { 1e-3 } else { 1e-10 };
        assert!((ball - agg).abs() < tol * ball, "p={p}: {ball} vs {agg}");
    }
}

#[test]
fn mixed_orders_in_one_call() {
    let f = cusp();
    let alphas = vec![
        MultiIndex::new(vec![1, 0, 0]),
        MultiIndex::new(vec![0, 2, 0]),
        MultiIndex::new(vec![0, 0, 0]),
    ];
    let r = RadialRegion::annulus(0.1, 1.0);
    let all = weighted_norms(&f, &alphas, &[1.0, 2.0, 0.0], 2.0, r, &opts()).unwrap();
    for (i, a) in alphas.iter().enumerate() {
        let one = weighted_norms(
            &f,
            std::slice::from_ref(a),
            &[[1.0, 2.0, 0.0][i]],
            2.0,
            r,
            &opts(),
        )
        .unwrap();
        assert!((one[0] - all[i]).abs() < 1e-14 * one[0]);
    }
}

#[test]
fn cusp_is_in_the_j_class() {
    let rep = j_class_check(&cusp(), f64::INFINITY, 0.9, 1.0, 10, &opts()).unwrap();
    assert!(rep.pass, "growth ratio {}", rep.growth_ratio);
    assert!(rep.envelope.a.is_finite() && rep.envelope.a > 0.0);
    assert_eq!(rep.sequence.orders[0], 1);
}

#[test]
fn superfactorial_sequence_fails_growth_test() {
    let orders: Vec<u32> = (1..=12).collect();
    let values: Vec<f64> = orders
        .iter()
        .map(|&k| (1..=k).map(|i| i as f64).product::<f64>().powi(2))
        .collect();
    let seq = SeminormSequence {
        p: 2.0,
        gamma: 1.0,
        radius: 1.0,
        orders,
        values,
    };
    assert!(!j_class_assess(seq).unwrap().pass);
}

#[test]
fn sequence_csv_columns() {
    let seq = SeminormSequence::compute(&cusp(), 2.0, 0.5, 1.0, 0..3, &opts()).unwrap();
    let csv = seq.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("j,seminorm,p,gamma,R"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 5);
    assert_eq!(wanalytic::io::parse_f64(row[1]), Some(seq.values[0]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn dyadic_scaling(j in 0u32..4, k in 0u32..3, pi in 0usize..4, gamma in 0.0f64..2.0, c in 0.5f64..3.0) {
        // f(x) = g(2^j x) gives |f|_{Gamma_j} = 2^{j(gamma - d/p)} |g|_{Gamma_0}
        let p = [1.0, 2.0, 3.0, f64::INFINITY][pi];
        let spec = WeightSpec { p, gamma, order: k };
        let g = Radial::new(PowerExp::cusp(c), 3);
        let f = Radial::new(PowerExp::cusp(c * 2f64.powi(j as i32)), 3);
        let a = weighted_seminorm(&f, &spec, dyadic_annulus(j, 1.0), &opts()).unwrap();
        let b = weighted_seminorm(&g, &spec, dyadic_annulus(0, 1.0), &opts()).unwrap();
        let scale = 2f64.powf(j as f64 * (gamma - 3.0 / p));
        prop_assert!((a - scale * b).abs() <= 1e-10 * a.max(1e-300));
    }

    #[test]
    fn weight_is_positive_and_distance_near_centers(d in 0.01f64..0.5, s in 0.0f64..1.0, dir in 0usize..3) {
        let set = SingularSet::new(vec![vec![0.0; 3]], d).unwrap();
        let mut x = vec![0.0; 3];
        x[dir] = s * d;
        prop_assert!((weight_eval(&x, &set) - s * d).abs() < 1e-15);
        x[dir] = d * (1.0 + 1.5 * s);
        let w = weight_eval(&x, &set);
        prop_assert!(w > 0.0 && w <= 1.0 + 1e-12);
    }

    #[test]
    fn envelope_recovers_generating_constant(a in 0.1f64..20.0, n in 3u32..15) {
        let orders: Vec<u32> = (0..n).collect();
        let values: Vec<f64> = orders.iter().map(|&j| a.powi(j as i32 + 1) * (1..=j).map(|i| i as f64).product::<f64>()).collect();
        let e = fit_envelope(&orders, &values).unwrap();
        prop_assert!((e.a - a).abs() < 1e-10 * a);
    }
}

fn blend_at(rho: f64, d: f64) -> f64 {
    let set = SingularSet::new(vec![vec![0.0, 0.0]], d).unwrap();
    weight_eval(&[rho, 0.0], &set)
}

#[test]
fn weight_is_c2_across_blend_boundaries() {
    for &d in &[0.1, 0.25, 0.5] {
        for &rho in &[d, 2.0 * d] {
            let h = 1e-4 * d;
            let second =
                |x: f64| (blend_at(x + h, d) - 2.0 * blend_at(x, d) + blend_at(x - h, d)) / (h * h);
            let first = |x: f64| (blend_at(x + h, d) - blend_at(x - h, d)) / (2.0 * h);
            // one-sided limits of value, slope and curvature agree
            let (l, r) = (rho - 10.0 * h, rho + 10.0 * h);
            assert!((blend_at(l, d) - blend_at(r, d)).abs() < 3e-3 * d);
            assert!((first(l) - first(r)).abs() < 1e-2, "slope jump at {rho}");
            assert!(
                (second(l) - second(r)).abs() < 1.0 / d,
                "curvature jump at {rho}: {} {}",
                second(l),
                second(r)
            );
        }
    }
}

#[test]
fn blend_is_monotone_for_small_d() {
    for &d in &[0.1, 0.25] {
        let mut prev = blend_at(d, d);
        for i in 1..=1000 {
            let v = blend_at(d * (1.0 + i as f64 / 1000.0), d);
            assert!(v >= prev - 1e-15, "d={d} not monotone at step {i}");
            prev = v;
        }
    }
}
