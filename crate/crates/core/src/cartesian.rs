//! Cartesian partial derivatives of radial functions.
//!
//! For g(|x|) and a multi-index alpha of order k,
//! d^alpha g(r w) = sum_{m=0}^{k} r^{m-k} g^{(m)}(r) Q_{alpha,m}(w),
//! where Q_{alpha,m} depends on the direction w only.

use crate::combinatorics::MultiIndex;

/// Angular coefficient tables for all multi-indices of one order.
#[derive(Debug, Clone)]
pub struct RadialCartesian {
    dim: usize,
    order: usize,
    alphas: Vec<MultiIndex>,
    /// per alpha: (coefficient, monomial exponents, row n of the a_{n,m} table)
    terms: Vec<Vec<(f64, Vec<u32>, usize)>>,
    /// a_{n,m}: (d/(r dr))^n g = sum_m a_{n,m} r^{m-2n} g^{(m)}
    a: Vec<Vec<f64>>,
}

impl RadialCartesian {
    pub fn new(dim: usize, order: usize) -> Self {
        let alphas = MultiIndex::of_order(dim, order as u32);
        let mut a = vec![vec![0.0; order + 1]; order + 1];
        a[0][0] = 1.0;
        for n in 0..order {
            for m in 0..=order {
                let mut v = (m as f64 - 2.0 * n as f64) * a[n][m];
                if m > 0 {
                    v += a[n][m - 1];
                }
                a[n + 1][m] = v;
            }
        }
        let terms = alphas
            .iter()
            .map(|alpha| {
                let mut out = Vec::new();
                let halves: Vec<u32> = alpha.0.iter().map(|x| x / 2).collect();
                for beta in MultiIndex::new(halves).below() {
                    let mut coef = 1.0;
                    let mut exps = Vec::with_capacity(dim);
                    for (&ai, &bi) in alpha.0.iter().zip(&beta.0) {
                        coef *= fact(ai) / (fact(bi) * fact(ai - 2 * bi) * 2f64.powi(bi as i32));
                        exps.push(ai - 2 * bi);
                    }
                    out.push((coef, exps, order - beta.order() as usize));
                }
                out
            })
            .collect();
        Self {
            dim,
            order,
            alphas,
            terms,
            a,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn alphas(&self) -> &[MultiIndex] {
        &self.alphas
    }

    /// Q_{alpha,m}(w) for every alpha (outer) and m = 0..=order (inner).
    pub fn angular(&self, w: &[f64]) -> Vec<f64> {
        let k = self.order;
        let mut q = vec![0.0; self.alphas.len() * (k + 1)];
        for (ia, terms) in self.terms.iter().enumerate() {
            for (coef, exps, n) in terms {
                let mono: f64 = exps
                    .iter()
                    .zip(w)
                    .map(|(&e, &wi)| wi.powi(e as i32))
                    .product();
                let c = coef * mono;
                for m in 0..=k {
                    q[ia * (k + 1) + m] += c * self.a[*n][m];
                }
            }
        }
        q
    }

    /// Combines radial derivatives g^{(m)}(r), m = 0..=order, with an angular
    /// table into d^alpha g for every alpha.
    pub fn combine(&self, r: f64, g: &[f64], q: &[f64], out: &mut [f64]) {
        let k = self.order;
        // scaled[m] = r^{m-k} g^{(m)}
        let mut scaled = vec![0.0; k + 1];
        let inv = 1.0 / r;
        let mut p = 1.0;
        for m in (0..=k).rev() {
            scaled[m] = p * g[m];
            p *= inv;
        }
        for (ia, o) in out.iter_mut().enumerate().take(self.alphas.len()) {
            let row = &q[ia * (k + 1)..(ia + 1) * (k + 1)];
            *o = row.iter().zip(&scaled).map(|(a, b)| a * b).sum();
        }
    }
}

fn fact(n: u32) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_direction_picks_the_radial_derivative() {
        for k in 0..8 {
            let t = RadialCartesian::new(3, k);
            let q = t.angular(&[1.0, 0.0, 0.0]);
            // alphas[0] = (k, 0, 0)
            for m in 0..=k {
                let expect = if m == k { 1.0 } else { 0.0 };
                assert!((q[m] - expect).abs() < 1e-12, "k={k} m={m} q={}", q[m]);
            }
        }
    }

    #[test]
    fn laplacian_identity() {
        // sum_i d_i^2 g = g'' + (d-1) g'/r for any direction
        for dim in 1..=3 {
            let t = RadialCartesian::new(dim, 2);
            let w: Vec<f64> = match dim {
                1 => vec![-1.0],
                2 => vec![0.6, -0.8],
                _ => vec![2.0 / 7.0, 3.0 / 7.0, 6.0 / 7.0],
            };
            let q = t.angular(&w);
            let (r, g) = (0.37, [0.3, -1.1, 2.5]);
            let mut out = vec![0.0; t.alphas().len()];
            t.combine(r, &g, &q, &mut out);
            let lap: f64 = t
                .alphas()
                .iter()
                .zip(&out)
                .filter(|(a, _)| a.0.contains(&2))
                .map(|(_, v)| v)
                .sum();
            let expect = g[2] + (dim as f64 - 1.0) * g[1] / r;
            assert!((lap - expect).abs() < 1e-12, "dim={dim}");
        }
    }

    #[test]
    fn mixed_derivative_of_r_squared() {
        // g = r^2: d_1 d_2 g = 0, d_1^2 g = 2
        let t = RadialCartesian::new(3, 2);
        let w = [0.48, 0.6, 0.64];
        let q = t.angular(&w);
        let r = 1.7;
        let g = [r * r, 2.0 * r, 2.0];
        let mut out = vec![0.0; 6];
        t.combine(r, &g, &q, &mut out);
        for (a, v) in t.alphas().iter().zip(&out) {
            let expect = if a.0.contains(&2) { 2.0 } else { 0.0 };
            assert!((v - expect).abs() < 1e-12, "{a:?} {v}");
        }
    }
}
