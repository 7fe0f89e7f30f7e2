use num_bigint::BigUint;
use proptest::prelude::*;
use std::f64::consts::PI;
use wanalytic::combinatorics::*;

fn all_indices(dim: usize, max_order: u32) -> Vec<MultiIndex> {
    (0..=max_order)
        .flat_map(|k| MultiIndex::of_order(dim, k))
        .collect()
}

#[test]
fn kato_identity_exact_to_order_eight() {
    for dim in 1..=3 {
        for alpha in all_indices(dim, 8) {
            let n = alpha.order();
            for i in 0..=n {
                assert_eq!(kato_sum(&alpha, i), binom(n, i), "{alpha:?}, i = {i}");
            }
        }
    }
}

#[test]
fn multi_binomial_matches_factorial_quotient() {
    for alpha in all_indices(3, 6) {
        for beta in alpha.below() {
            let gamma = alpha.checked_sub(&beta).unwrap();
            let want = alpha.factorial() / (beta.factorial() * gamma.factorial());
            assert_eq!(binom_multi(&alpha, &beta).unwrap(), want);
        }
    }
}

#[test]
fn riemann_sum_stays_below_pi() {
    let (j, s) = riemann_sqrt_sum_max(100_000);
    assert!(s <= PI, "S({j}) = {s}");
    // the sum approaches the arcsine integral from below
    assert!(PI - riemann_sqrt_sum(100_000) < 0.02);
}

#[test]
fn fibonacci_golden_bound_to_ninety() {
    let (mut a, mut b) = (1u128, 1u128);
    for i in 0..=90u32 {
        assert_eq!(fibonacci(i), BigUint::from(a));
        assert!(fibonacci_golden_bound_exact(i), "i = {i}");
        (a, b) = (b, a + b);
    }
}

#[test]
fn stirling_brackets_factorial_to_twenty() {
    for n in 1..=20 {
        assert!(stirling_holds_exact(n).unwrap(), "n = {n}");
        let (lo, hi) = stirling_bounds(n as u64).unwrap();
        let f = factorial_f64(n);
        assert!(lo <= f && f <= hi);
    }
    assert!(stirling_log_slack(10_000).unwrap() > 0.0);
}

#[test]
fn fib_majorant_is_attained_by_the_equality_recursion() {
    // s_i = t_i + s_{i+1} + s_{i+2} backwards from s_{j-1}, s_j
    let t = [0.5, 2.0, 1.0, 3.0, 0.25];
    let j = t.len() + 1;
    let mut s = vec![0.0; j + 1];
    s[j - 1] = 1.5;
    s[j] = 0.75;
    for i in (0..j - 1).rev() {
        s[i] = t[i] + s[i + 1] + s[i + 2];
    }
    let m = fib_majorant(&t, s[j - 1], s[j]).unwrap();
    assert!((m - s[0]).abs() < 1e-12, "{m} vs {}", s[0]);
}

proptest! {
    #[test]
    fn kato_rows_sum_to_powers_of_two(a in 0u32..5, b in 0u32..5, c in 0u32..5) {
        let alpha = MultiIndex::new(vec![a, b, c]);
        let total: BigUint = (0..=alpha.order()).map(|i| kato_sum(&alpha, i)).sum();
        prop_assert_eq!(total, BigUint::from(2u32).pow(alpha.order()));
    }

    #[test]
    fn binomial_float_agrees_with_exact(n in 0u32..40, k in 0u32..40) {
        let exact = binom(n, k).to_string().parse::<f64>().unwrap();
        let f = binom_f64(n, k);
        prop_assert!((f - exact).abs() <= 1e-12 * exact.max(1.0));
    }

    #[test]
    fn fib_majorant_dominates_any_subsolution(
        t in prop::collection::vec(0.0f64..5.0, 1..12),
        slack in prop::collection::vec(0.0f64..1.0, 12),
        end in (0.0f64..3.0, 0.0f64..3.0),
    ) {
        let j = t.len() + 1;
        let mut s = vec![0.0; j + 1];
        s[j - 1] = end.0;
        s[j] = end.1;
        for i in (0..j - 1).rev() {
            s[i] = (t[i] + s[i + 1] + s[i + 2]) * (1.0 - slack[i]);
        }
        let m = fib_majorant(&t, end.0, end.1).unwrap();
        prop_assert!(s[0] <= m * (1.0 + 1e-12));
    }
}
