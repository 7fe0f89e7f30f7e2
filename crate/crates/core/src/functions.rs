//! Radial and Cartesian test functions with exact derivative oracles.

use crate::cartesian::RadialCartesian;
use crate::combinatorics::MultiIndex;
use crate::jet::Jet;
use serde::{Deserialize, Serialize};

/// A function g(r) of the distance to a singular point.
pub trait RadialFunction: Sync {
    /// g^{(m)}(r) for m = 0..=max_order, at r > 0.
    fn derivatives(&self, r: f64, max_order: usize) -> Vec<f64>;

    fn value(&self, r: f64) -> f64 {
        self.derivatives(r, 0)[0]
    }

    /// Smallest power s of the non-polynomial part of g(|x|) near the origin
    /// (Cartesian derivatives of order k then behave like r^{s-k}); `None`
    /// when g(|x|) is smooth at the origin.
    fn singular_power(&self) -> Option<f64>;

    /// Lowest power in the expansion of the smooth part of g(|x|) at the
    /// origin; `u32::MAX` when there is no smooth part.
    fn smooth_order(&self) -> u32 {
        0
    }
}

/// A function on R^d with Cartesian partial derivatives.
pub trait Field: Sync {
    fn dim(&self) -> usize;

    /// See [`RadialFunction::singular_power`].
    fn singular_power(&self) -> Option<f64>;

    /// Lowest total degree of the smooth part's Taylor expansion at the
    /// origin; derivatives of order k below it vanish like r^{m-k}.
    fn origin_order(&self) -> u32 {
        0
    }

    /// d^alpha f(x) for each alpha.
    fn partials(&self, x: &[f64], alphas: &[MultiIndex], out: &mut [f64]);

    /// Radial functions expose their profile so integrals can reuse angular tables.
    fn as_radial(&self) -> Option<&dyn RadialFunction> {
        None
    }
}

/// Radial profile placed in R^d.
pub struct Radial<F> {
    pub profile: F,
    pub dim: usize,
}

impl<F: RadialFunction> Radial<F> {
    pub fn new(profile: F, dim: usize) -> Self {
        Self { profile, dim }
    }
}

impl<F: RadialFunction> Field for Radial<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn singular_power(&self) -> Option<f64> {
        self.profile.singular_power()
    }

    fn origin_order(&self) -> u32 {
        self.profile.smooth_order()
    }

    fn partials(&self, x: &[f64], alphas: &[MultiIndex], out: &mut [f64]) {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let w: Vec<f64> = x.iter().map(|v| v / r).collect();
        for (alpha, o) in alphas.iter().zip(out.iter_mut()) {
            let k = alpha.order() as usize;
            let table = RadialCartesian::new(self.dim, k);
            let idx = table
                .alphas()
                .iter()
                .position(|a| a == alpha)
                .expect("alpha of matching order");
            let g = self.profile.derivatives(r, k);
            let q = table.angular(&w);
            let mut all = vec![0.0; table.alphas().len()];
            table.combine(r, &g, &q, &mut all);
            *o = all[idx];
        }
    }

    fn as_radial(&self) -> Option<&dyn RadialFunction> {
        Some(&self.profile)
    }
}

/// amplitude * r^power * exp(-decay r).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerExp {
    pub amplitude: f64,
    pub power: f64,
    pub decay: f64,
}

impl PowerExp {
    pub fn new(amplitude: f64, power: f64, decay: f64) -> Self {
        Self {
            amplitude,
            power,
            decay,
        }
    }

    /// exp(-decay r): the model cusp.
    pub fn cusp(decay: f64) -> Self {
        Self::new(1.0, 0.0, decay)
    }
}

fn is_integer(x: f64) -> bool {
    (x - x.round()).abs() < 1e-12
}

fn is_even_integer(x: f64) -> bool {
    is_integer(x) && (x.round() as i64) % 2 == 0
}

impl RadialFunction for PowerExp {
    fn derivatives(&self, r: f64, max_order: usize) -> Vec<f64> {
        let x = Jet::var(r, max_order);
        let e = x.scale(-self.decay).exp();
        let j = if self.power == 0.0 {
            e
        } else {
            &x.powf(self.power) * &e
        };
        j.scale(self.amplitude).derivatives()
    }

    fn singular_power(&self) -> Option<f64> {
        let s = self.power;
        if !is_even_integer(s) {
            Some(s)
        } else if self.decay != 0.0 {
            // r^s (1 - c r + ...) first odd power is s + 1
            Some(s + 1.0)
        } else {
            None
        }
    }

    fn smooth_order(&self) -> u32 {
        if self.amplitude == 0.0 {
            u32::MAX
        } else if is_even_integer(self.power) {
            self.power.round() as u32
        } else {
            u32::MAX
        }
    }
}

/// amplitude * exp(-a r^2), smooth at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaussian {
    pub amplitude: f64,
    pub a: f64,
}

impl RadialFunction for Gaussian {
    fn derivatives(&self, r: f64, max_order: usize) -> Vec<f64> {
        let x = Jet::var(r, max_order);
        (&x * &x)
            .scale(-self.a)
            .exp()
            .scale(self.amplitude)
            .derivatives()
    }

    fn singular_power(&self) -> Option<f64> {
        None
    }
}

/// Smooth bump supported in the open annulus inner < r < outer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusBump {
    pub inner: f64,
    pub outer: f64,
}

impl RadialFunction for AnnulusBump {
    fn derivatives(&self, r: f64, max_order: usize) -> Vec<f64> {
        if r <= self.inner || r >= self.outer {
            return vec![0.0; max_order + 1];
        }
        let (a, b) = (self.inner, self.outer);
        let x = Jet::var(r, max_order);
        // t in (-1, 1); bump = exp(-1/(1 - t^2)) = exp(-1 / ((1-t)(1+t)))
        let t = &x.scale(2.0 / (b - a)) - &Jet::constant((a + b) / (b - a), max_order);
        let one = Jet::constant(1.0, max_order);
        let den = &(&one - &t) * &(&one + &t);
        (&(-&one) / &den).exp().derivatives()
    }

    fn singular_power(&self) -> Option<f64> {
        None
    }

    fn smooth_order(&self) -> u32 {
        u32::MAX
    }
}

/// Multivariate polynomial sum_i c_i x^{e_i}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub dim: usize,
    pub terms: Vec<(f64, MultiIndex)>,
}

impl Polynomial {
    pub fn new(dim: usize, terms: Vec<(f64, Vec<u32>)>) -> Self {
        Self {
            dim,
            terms: terms
                .into_iter()
                .map(|(c, e)| (c, MultiIndex::new(e)))
                .collect(),
        }
    }

    pub fn partial(&self, x: &[f64], alpha: &MultiIndex) -> f64 {
        let mut total = 0.0;
        for (c, e) in &self.terms {
            let Some(rest) = e.checked_sub(alpha) else {
                continue;
            };
            let mut v = *c;
            for ((&ei, &ai), (&ri, &xi)) in e.0.iter().zip(&alpha.0).zip(rest.0.iter().zip(x)) {
                // falling factorial e_i (e_i - 1) ... (e_i - a_i + 1)
                v *= (0..ai).map(|j| (ei - j) as f64).product::<f64>();
                v *= xi.powi(ri as i32);
            }
            total += v;
        }
        total
    }
}

impl Field for Polynomial {
    fn dim(&self) -> usize {
        self.dim
    }

    fn singular_power(&self) -> Option<f64> {
        None
    }

    fn origin_order(&self) -> u32 {
        self.terms
            .iter()
            .filter(|(c, _)| *c != 0.0)
            .map(|(_, e)| e.order())
            .min()
            .unwrap_or(u32::MAX)
    }

    fn partials(&self, x: &[f64], alphas: &[MultiIndex], out: &mut [f64]) {
        for (a, o) in alphas.iter().zip(out.iter_mut()) {
            *o = self.partial(x, a);
        }
    }
}

/// A radial profile multiplied by a polynomial, e.g. x_1 exp(-r).
pub struct PolynomialTimesRadial<F> {
    pub poly: Polynomial,
    pub radial: Radial<F>,
}

impl<F: RadialFunction> Field for PolynomialTimesRadial<F> {
    fn dim(&self) -> usize {
        self.poly.dim
    }

    fn singular_power(&self) -> Option<f64> {
        self.radial.singular_power()
    }

    fn partials(&self, x: &[f64], alphas: &[MultiIndex], out: &mut [f64]) {
        // Leibniz rule over beta <= alpha
        for (alpha, o) in alphas.iter().zip(out.iter_mut()) {
            let mut total = 0.0;
            for beta in alpha.below() {
                let rest = alpha.checked_sub(&beta).expect("beta below alpha");
                let c: f64 = alpha
                    .0
                    .iter()
                    .zip(&beta.0)
                    .map(|(&a, &b)| binom_f64(a, b))
                    .product();
                let p = self.poly.partial(x, &beta);
                if p == 0.0 {
                    continue;
                }
                let mut g = [0.0];
                self.radial.partials(x, std::slice::from_ref(&rest), &mut g);
                total += c * p * g[0];
            }
            *o = total;
        }
    }
}

fn binom_f64(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_exp_derivatives() {
        let f = PowerExp::new(2.0, 0.5, 3.0);
        let r: f64 = 0.4;
        let d = f.derivatives(r, 1);
        let v = 2.0 * r.sqrt() * (-3.0 * r).exp();
        let dv = 2.0 * (0.5 / r.sqrt() - 3.0 * r.sqrt()) * (-3.0 * r).exp();
        assert!((d[0] - v).abs() < 1e-14);
        assert!((d[1] - dv).abs() < 1e-13);
        assert_eq!(PowerExp::cusp(1.0).singular_power(), Some(1.0));
        assert_eq!(PowerExp::new(1.0, 2.0, 0.0).singular_power(), None);
        assert_eq!(PowerExp::new(1.0, 2.0, 1.0).singular_power(), Some(3.0));
    }

    #[test]
    fn radial_partials_match_polynomial_for_r_squared() {
        let radial = Radial::new(PowerExp::new(1.0, 2.0, 0.0), 3);
        let poly = Polynomial::new(
            3,
            vec![
                (1.0, vec![2, 0, 0]),
                (1.0, vec![0, 2, 0]),
                (1.0, vec![0, 0, 2]),
            ],
        );
        let x = [0.3, -0.2, 0.5];
        let alphas: Vec<MultiIndex> = (0..=3).flat_map(|k| MultiIndex::of_order(3, k)).collect();
        let mut a = vec![0.0; alphas.len()];
        let mut b = vec![0.0; alphas.len()];
        radial.partials(&x, &alphas, &mut a);
        poly.partials(&x, &alphas, &mut b);
        for i in 0..alphas.len() {
            assert!((a[i] - b[i]).abs() < 1e-12, "{:?}", alphas[i]);
        }
    }

    #[test]
    fn bump_vanishes_outside_support() {
        let b = AnnulusBump {
            inner: 0.25,
            outer: 0.5,
        };
        assert_eq!(b.value(0.2), 0.0);
        assert!(b.value(0.375) > 0.0);
        assert!((b.value(0.375) - (-1.0f64).exp()).abs() < 1e-15);
    }
}
