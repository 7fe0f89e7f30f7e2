//! Exact multi-index combinatorics and the scalar inequalities used to bound
//! derivative recursions: Stirling bounds, the discrete arcsine sum and the
//! Fibonacci majorant of a three-term recursion.

use crate::error::{invalid, Error, Result};
use crate::quadrature::CompensatedSum;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::f64::consts::{E, PI};

/// Multi-index alpha in N^d.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn new(parts: Vec<u32>) -> Self {
        Self(parts)
    }

    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    /// Unit index e_i in dimension `dim`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = vec![0; dim];
        v[i] = 1;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// |alpha| = sum of components.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Componentwise partial order beta <= alpha.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// alpha - beta, or None unless beta <= alpha.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if !other.le(self) {
            return None;
        }
        Some(MultiIndex(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    /// All multi-indices of dimension `dim` and order `k`, in descending
    /// lexicographic order (so (k,0,..,0) comes first).
    pub fn of_order(dim: usize, k: u32) -> Vec<MultiIndex> {
        fn rec(dim: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if prefix.len() + 1 == dim {
                prefix.push(left);
                out.push(MultiIndex(prefix.clone()));
                prefix.pop();
                return;
            }
            for a in (0..=left).rev() {
                prefix.push(a);
                rec(dim, left - a, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if dim == 0 {
            if k == 0 {
                out.push(MultiIndex(vec![]));
            }
            return out;
        }
        rec(dim, k, &mut Vec::with_capacity(dim), &mut out);
        out
    }

    /// All beta <= alpha.
    pub fn below(&self) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex(Vec::with_capacity(self.dim()))];
        for &a in &self.0 {
            let mut next = Vec::with_capacity(out.len() * (a as usize + 1));
            for prefix in &out {
                for b in 0..=a {
                    let mut p = prefix.clone();
                    p.0.push(b);
                    next.push(p);
                }
            }
            out = next;
        }
        out
    }

    /// alpha! = prod alpha_i!.
    pub fn factorial(&self) -> BigUint {
        self.0.iter().map(|&a| factorial(a)).product()
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

pub fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// Scalar binomial coefficient, zero when k > n.
pub fn binom(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Floating-point n!, exact up to n = 22.
pub fn factorial_f64(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// Floating-point binomial coefficient, zero when k > n.
pub fn binom_f64(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Multi-index binomial C(alpha, beta) = prod C(alpha_i, beta_i).
pub fn binom_multi(alpha: &MultiIndex, beta: &MultiIndex) -> Result<BigUint> {
    if alpha.dim() != beta.dim() {
        return invalid(format!(
            "dimension mismatch {} vs {}",
            alpha.dim(),
            beta.dim()
        ));
    }
    if !beta.le(alpha) {
        return invalid(format!("{beta:?} is not <= {alpha:?}"));
    }
    Ok(alpha
        .0
        .iter()
        .zip(&beta.0)
        .map(|(&a, &b)| binom(a, b))
        .product())
}

/// Sum of C(alpha, beta) over beta <= alpha with |beta| = i. Equals C(|alpha|, i).
pub fn kato_sum(alpha: &MultiIndex, i: u32) -> BigUint {
    alpha
        .below()
        .iter()
        .filter(|b| b.order() == i)
        .map(|b| binom_multi(alpha, b).expect("beta below alpha"))
        .sum()
}

/// ln n! by compensated summation of ln i.
pub fn ln_factorial(n: u64) -> f64 {
    (2..=n)
        .map(|i| (i as f64).ln())
        .collect::<CompensatedSum>()
        .value()
}

/// Natural logs of the Stirling bounds sqrt(2 pi n)(n/e)^n <= n! <= e sqrt(n)(n/e)^n.
pub fn ln_stirling_bounds(n: u64) -> Result<(f64, f64)> {
    if n == 0 {
        return invalid("Stirling bounds need n >= 1");
    }
    let nf = n as f64;
    let core = nf * (nf.ln() - 1.0);
    Ok((
        0.5 * (2.0 * PI * nf).ln() + core,
        1.0 + 0.5 * nf.ln() + core,
    ))
}

/// Stirling bounds (lower, upper) for n!, evaluated in log space.
pub fn stirling_bounds(n: u64) -> Result<(f64, f64)> {
    let (lo, hi) = ln_stirling_bounds(n)?;
    let (lo, hi) = (lo.exp(), hi.exp());
    if !hi.is_finite() {
        return Err(Error::Overflow(format!(
            "Stirling bound for n = {n} exceeds f64; use ln_stirling_bounds"
        )));
    }
    Ok((lo, hi))
}

/// Checks both Stirling bounds against the exact factorial, as rationals.
pub fn stirling_holds_exact(n: u32) -> Result<bool> {
    let (lo, hi) = stirling_bounds(n as u64)?;
    let f = BigRational::from_integer(BigInt::from(factorial(n)));
    let lo =
        BigRational::from_float(lo).ok_or_else(|| Error::Overflow("non-finite bound".into()))?;
    let hi =
        BigRational::from_float(hi).ok_or_else(|| Error::Overflow("non-finite bound".into()))?;
    Ok(lo <= f && f <= hi)
}

/// Checks the Stirling bounds in log space against ln n! summed directly.
/// Returns the smallest slack over both sides (positive means both hold).
pub fn stirling_log_slack(n: u64) -> Result<f64> {
    let (lo, hi) = ln_stirling_bounds(n)?;
    let lf = ln_factorial(n);
    Ok((lf - lo).min(hi - lf))
}

/// S(j) = sum_{i=1}^{j-1} 1/sqrt(i (j-i)); zero for j < 2.
pub fn riemann_sqrt_sum(j: u64) -> f64 {
    if j < 2 {
        return 0.0;
    }
    let jf = j as f64;
    let half = (j - 1) / 2;
    let mut acc = CompensatedSum::new();
    // blocks of plain summation keep the inner loop vectorizable; the block
    // sums are then combined with compensation
    const BLOCK: u64 = 512;
    let mut start = 1;
    while start <= half {
        let end = (start + BLOCK - 1).min(half);
        let mut block = 0.0;
        for i in start..=end {
            let x = i as f64;
            block += 1.0 / (x * (jf - x)).sqrt();
        }
        acc.add(2.0 * block);
        start = end + 1;
    }
    if j.is_multiple_of(2) {
        acc.add(2.0 / jf);
    }
    acc.value()
}

/// Largest S(j) over 2 <= j <= j_max together with its argument.
pub fn riemann_sqrt_sum_max(j_max: u64) -> (u64, f64) {
    (2..=j_max)
        .map(|j| (j, riemann_sqrt_sum(j)))
        .fold((0, f64::NEG_INFINITY), |best, cur| {
            if cur.1 > best.1 {
                cur
            } else {
                best
            }
        })
}

/// Golden ratio (1 + sqrt 5)/2.
pub const GOLDEN: f64 = 1.618_033_988_749_895;

/// Fibonacci numbers with F_0 = F_1 = 1.
pub fn fibonacci(i: u32) -> BigUint {
    let (mut a, mut b) = (BigUint::one(), BigUint::one());
    for _ in 0..i {
        let c = &a + &b;
        a = b;
        b = c;
    }
    a
}

/// Exact check of F_i <= golden^i (with F_0 = F_1 = 1) in Z[sqrt 5].
///
/// golden^i = (L_i + G_i sqrt 5)/2 with G the standard Fibonacci sequence
/// (G_0 = 0) and L the Lucas numbers, and F_i = G_{i+1}.
pub fn fibonacci_golden_bound_exact(i: u32) -> bool {
    let (mut g, mut g1) = (BigInt::zero(), BigInt::one()); // G_n, G_{n+1}
    let (mut l, mut l1) = (BigInt::from(2), BigInt::one()); // L_n, L_{n+1}
    for _ in 0..i {
        let g2 = &g + &g1;
        g = std::mem::replace(&mut g1, g2);
        let l2 = &l + &l1;
        l = std::mem::replace(&mut l1, l2);
    }
    // F_i <= (L_i + G_i sqrt5)/2  <=>  2 G_{i+1} - L_i <= G_i sqrt 5
    let lhs = BigInt::from(2) * &g1 - &l;
    if lhs <= BigInt::zero() {
        return true;
    }
    &lhs * &lhs <= BigInt::from(5) * &g * &g
}

/// Closed-form bound on s_0 for the recursion s_i <= t_i + s_{i+1} + s_{i+2},
/// 0 <= i <= j-2, with terminal values s_{j-1}, s_j:
/// s_0 <= sum_{i=0}^{j-2} F_i t_i + F_{j-1} s_{j-1} + F_{j-2} s_j, where j = t.len() + 1.
pub fn fib_majorant(t: &[f64], s_prev: f64, s_last: f64) -> Result<f64> {
    if t.is_empty() {
        return invalid("fib_majorant needs j >= 2 (at least one t value)");
    }
    if t.iter().any(|x| !x.is_finite() || *x < 0.0) || !(s_prev >= 0.0 && s_last >= 0.0) {
        return invalid("fib_majorant needs finite nonnegative inputs");
    }
    let j = t.len() + 1;
    let mut fib = vec![1.0f64; j];
    for i in 2..j {
        fib[i] = fib[i - 1] + fib[i - 2];
    }
    let mut acc: CompensatedSum = t.iter().zip(&fib).map(|(t, f)| t * f).collect();
    acc.add(fib[j - 1] * s_prev);
    acc.add(fib[j - 2] * s_last);
    Ok(acc.value())
}

/// Bounds used by the induction: (1 + 1/j)^j <= e.
pub fn compound_bound_holds(j: u64) -> bool {
    (1.0 + 1.0 / j as f64).powf(j as f64) <= E
}
