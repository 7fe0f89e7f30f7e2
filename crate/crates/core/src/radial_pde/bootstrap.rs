//! High-order radial derivatives of solutions of the coupled radial system
//!
//!   t (phi_i'' + (d-1)/r phi_i') = (V - lambda_i) phi_i + sum c u_ab phi_s
//!   u_ab'' + (d-1)/r u_ab' = -4 pi phi_a phi_b
//!
//! with V = -Z/r + polynomial. Derivatives come from the regular power series
//! at the origin (anchored by phi(0), u(0) of the discrete solution) when it
//! converges at r0, and otherwise from repeated differentiation of the ODE at
//! r0 itself, which is reported as unstable when it amplifies errors in the
//! base values too much.

use super::field::RadialField;
use crate::combinatorics::{binom_f64, factorial_f64};
use crate::error::{invalid, Error, Result};
use crate::potentials::CentralPotential;

/// One term c * u_pair * phi_partner in the equation of `orbital`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingTerm {
    pub orbital: usize,
    pub partner: usize,
    pub pair: usize,
    pub coefficient: f64,
}

/// Coefficients of the coupled radial system.
#[derive(Debug, Clone)]
pub struct RadialOde {
    pub dim: usize,
    pub kinetic: f64,
    pub potential: CentralPotential,
    pub lambdas: Vec<f64>,
    /// orbital pairs (a, b) whose potentials u_ab enter the couplings
    pub pairs: Vec<(usize, usize)>,
    pub couplings: Vec<CouplingTerm>,
}

impl RadialOde {
    /// Single linear equation t (phi'' + (d-1)/r phi') = (V - lambda) phi.
    pub fn linear(dim: usize, kinetic: f64, potential: CentralPotential, lambda: f64) -> Self {
        Self {
            dim,
            kinetic,
            potential,
            lambdas: vec![lambda],
            pairs: vec![],
            couplings: vec![],
        }
    }

    fn validate(&self, orbitals: usize, potentials: usize) -> Result<()> {
        if self.dim < 2 && self.potential.charge != 0.0 {
            return invalid("a Coulomb term needs d >= 2");
        }
        if !(self.kinetic > 0.0) {
            return invalid("kinetic prefactor must be positive");
        }
        if self.lambdas.len() != orbitals {
            return invalid(format!(
                "{} eigenvalues for {orbitals} orbitals",
                self.lambdas.len()
            ));
        }
        if self.pairs.len() != potentials {
            return invalid(format!(
                "{} pair potentials for {} pairs",
                potentials,
                self.pairs.len()
            ));
        }
        for &(a, b) in &self.pairs {
            if a >= orbitals || b >= orbitals {
                return invalid("pair index out of range");
            }
        }
        for c in &self.couplings {
            if c.orbital >= orbitals || c.partner >= orbitals || c.pair >= self.pairs.len() {
                return invalid("coupling index out of range");
            }
        }
        Ok(())
    }
}

/// Which path produced the derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BootstrapMethod {
    /// origin series summed with this many terms
    OriginSeries { terms: usize },
    /// differentiation of the ODE at r0; amplification of base-value errors
    Pointwise { amplification: f64 },
}

/// Derivatives phi_i^{(m)}(r0), m = 0..=m_max, for every orbital.
#[derive(Debug, Clone)]
pub struct Bootstrap {
    pub r0: f64,
    pub derivatives: Vec<Vec<f64>>,
    pub method: BootstrapMethod,
}

/// Pointwise results whose relative sensitivity to the base values exceeds
/// this are rejected (base values carry about 1e-10 relative error, so the
/// derivatives would keep fewer than about 3 digits).
pub const MAX_AMPLIFICATION: f64 = 1e7;

pub(crate) const SERIES_MAX_TERMS: usize = 400;
const SERIES_TOLERANCE: f64 = 1e-14;

/// Taylor coefficients at the origin of the regular solution, given phi_i(0)
/// and u_ab(0).
pub fn origin_series(
    ode: &RadialOde,
    phi0: &[f64],
    u0: &[f64],
    terms: usize,
) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let n_orb = phi0.len();
    let d = ode.dim as f64;
    let z = ode.potential.charge;
    let mut a: Vec<Vec<f64>> = phi0.iter().map(|&v| vec![v]).collect();
    let mut b: Vec<Vec<f64>> = u0.iter().map(|&v| vec![v, 0.0]).collect();
    let smooth = |i: usize| ode.potential.smooth.get(i).copied().unwrap_or(0.0);
    for n in 1..terms {
        // u series needs phi up to n - 2
        if n >= 2 {
            for (p, &(ia, ib)) in ode.pairs.iter().enumerate() {
                let k = n - 2;
                let rho: f64 = (0..=k).map(|i| a[ia][i] * a[ib][k - i]).sum();
                let nf = n as f64;
                b[p].push(-4.0 * std::f64::consts::PI * rho / (nf * (nf + d - 2.0)));
            }
        }
        let nf = n as f64;
        let denom = ode.kinetic * nf * (nf + d - 2.0);
        let mut next = vec![0.0; n_orb];
        for (i, slot) in next.iter_mut().enumerate() {
            let mut s = -z * a[i][n - 1];
            if n >= 2 {
                for j in 0..=n - 2 {
                    let w = smooth(n - 2 - j) - if j == n - 2 { ode.lambdas[i] } else { 0.0 };
                    s += w * a[i][j];
                }
            }
            *slot = s;
        }
        if n >= 2 {
            for c in &ode.couplings {
                let k = n - 2;
                let conv: f64 = (0..=k).map(|j| b[c.pair][k - j] * a[c.partner][j]).sum();
                next[c.orbital] += c.coefficient * conv;
            }
        }
        for (i, v) in next.into_iter().enumerate() {
            a[i].push(v / denom);
        }
    }
    for bp in b.iter_mut() {
        bp.truncate(terms);
    }
    (a, b)
}

/// Sums d^m/dr^m of a power series at r0; None if the tail has not died out.
pub(crate) fn sum_series(coefs: &[f64], m_max: usize, r0: f64) -> Option<(Vec<f64>, usize)> {
    let n = coefs.len();
    let mut out = vec![0.0; m_max + 1];
    for (m, slot) in out.iter_mut().enumerate() {
        let mut total = 0.0;
        let mut scale = 0.0f64;
        let mut tail = 0.0f64;
        for (k, &c) in coefs.iter().enumerate().skip(m) {
            // k!/(k-m)! r0^{k-m}
            let falling: f64 = (0..m).map(|i| (k - i) as f64).product();
            let term = c * falling * r0.powi((k - m) as i32);
            total += term;
            scale = scale.max(term.abs());
            if k + 20 >= n {
                tail = tail.max(term.abs());
            }
        }
        if !total.is_finite() || tail > SERIES_TOLERANCE * scale.max(f64::MIN_POSITIVE) {
            return None;
        }
        *slot = total;
    }
    Some((out, n))
}

/// Derivatives at r0 of the discrete solution (orbitals, pair potentials).
pub fn derivative_bootstrap(
    ode: &RadialOde,
    orbitals: &[RadialField],
    potentials: &[RadialField],
    m_max: usize,
    r0: f64,
) -> Result<Bootstrap> {
    ode.validate(orbitals.len(), potentials.len())?;
    if !(r0 > 1e-12 && r0.is_finite()) {
        return invalid(format!("evaluation radius must be positive, got {r0}"));
    }
    let phi0: Vec<f64> = orbitals.iter().map(|f| f.value(0.0)).collect();
    let u0: Vec<f64> = potentials.iter().map(|f| f.value(0.0)).collect();
    let (a, _) = origin_series(ode, &phi0, &u0, SERIES_MAX_TERMS);
    let summed: Option<Vec<(Vec<f64>, usize)>> =
        a.iter().map(|c| sum_series(c, m_max, r0)).collect();
    if let Some(s) = summed {
        let terms = s.iter().map(|x| x.1).max().unwrap_or(0);
        return Ok(Bootstrap {
            r0,
            derivatives: s.into_iter().map(|x| x.0).collect(),
            method: BootstrapMethod::OriginSeries { terms },
        });
    }
    pointwise_bootstrap(ode, orbitals, potentials, m_max, r0)
}

/// Base values (f, f') at r0 from each field's local polynomial.
fn base_values(fields: &[RadialField], r0: f64) -> Vec<[f64; 2]> {
    fields
        .iter()
        .map(|f| {
            let (v, dv) = f.space.eval(&f.values, r0);
            [v, dv]
        })
        .collect()
}

/// Repeated differentiation of the ODE at r0, with an amplification check.
pub fn pointwise_bootstrap(
    ode: &RadialOde,
    orbitals: &[RadialField],
    potentials: &[RadialField],
    m_max: usize,
    r0: f64,
) -> Result<Bootstrap> {
    ode.validate(orbitals.len(), potentials.len())?;
    let phi = base_values(orbitals, r0);
    let u = base_values(potentials, r0);
    let reference = pointwise_recurrence(ode, &phi, &u, m_max, r0);
    // relative perturbation of every first derivative
    let delta = 1e-7;
    let perturbed_phi: Vec<[f64; 2]> = phi
        .iter()
        .map(|p| [p[0], p[1] + delta * p[0].abs().max(p[1].abs())])
        .collect();
    let perturbed = pointwise_recurrence(ode, &perturbed_phi, &u, m_max, r0);
    let mut amplification = 0.0f64;
    for (x, y) in reference.iter().zip(&perturbed) {
        let scale = x.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        for (m, (p, q)) in x.iter().zip(y).enumerate() {
            if !p.is_finite() {
                return Err(Error::Unstable(format!(
                    "derivative of order {m} at r0 = {r0} is not finite"
                )));
            }
            let denom = p.abs().max(1e-12 * scale).max(f64::MIN_POSITIVE);
            amplification = amplification.max((p - q).abs() / denom / delta);
        }
    }
    if amplification > MAX_AMPLIFICATION {
        return Err(Error::Unstable(format!(
            "derivative recurrence at r0 = {r0} amplifies base-value errors by {amplification:.2e}"
        )));
    }
    Ok(Bootstrap {
        r0,
        derivatives: reference,
        method: BootstrapMethod::Pointwise { amplification },
    })
}

/// Forward recurrence of derivatives at r0 from (f, f') of every orbital and potential.
pub fn pointwise_recurrence(
    ode: &RadialOde,
    phi: &[[f64; 2]],
    u: &[[f64; 2]],
    m_max: usize,
    r0: f64,
) -> Vec<Vec<f64>> {
    let d = ode.dim as f64;
    let len = m_max.max(1) + 1;
    let vd = ode.potential.derivatives(r0, len);
    // (1/r)^{(i)} = (-1)^i i! / r^{i+1}
    let inv_r: Vec<f64> = (0..=len)
        .map(|i| {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            s * factorial_f64(i as u32) / r0.powi(i as i32 + 1)
        })
        .collect();
    let mut f: Vec<Vec<f64>> = phi.iter().map(|p| p.to_vec()).collect();
    let mut g: Vec<Vec<f64>> = u.iter().map(|p| p.to_vec()).collect();
    for m in 0..len.saturating_sub(1) {
        // order m + 2 from orders <= m + 1
        let mut new_g = Vec::with_capacity(g.len());
        for (p, &(ia, ib)) in ode.pairs.iter().enumerate() {
            let mut s = 0.0;
            for i in 0..=m {
                s -= 4.0
                    * std::f64::consts::PI
                    * binom_f64(m as u32, i as u32)
                    * f[ia][i]
                    * f[ib][m - i];
                s -= (d - 1.0) * binom_f64(m as u32, i as u32) * inv_r[i] * g[p][m + 1 - i];
            }
            new_g.push(s);
        }
        let mut new_f = Vec::with_capacity(f.len());
        for (k, fk) in f.iter().enumerate() {
            let mut s = 0.0;
            for i in 0..=m {
                let c = binom_f64(m as u32, i as u32);
                let w = vd[i] - if i == 0 { ode.lambdas[k] } else { 0.0 };
                s += c * w * fk[m - i] / ode.kinetic;
                s -= (d - 1.0) * c * inv_r[i] * fk[m + 1 - i];
            }
            new_f.push(s);
        }
        for c in &ode.couplings {
            for i in 0..=m {
                new_f[c.orbital] += c.coefficient
                    * binom_f64(m as u32, i as u32)
                    * g[c.pair][i]
                    * f[c.partner][m - i]
                    / ode.kinetic;
            }
        }
        for (p, v) in new_g.into_iter().enumerate() {
            g[p].push(v);
        }
        for (k, v) in new_f.into_iter().enumerate() {
            f[k].push(v);
        }
    }
    f.into_iter()
        .map(|mut v| {
            v.truncate(m_max + 1);
            v
        })
        .collect()
}

/// On the positive x1 axis the pure partial d_1^k of a radial function is
/// its k-th radial derivative, so this is the identity.
pub fn axis_cartesian_derivatives(radial: &[f64]) -> Vec<f64> {
    radial.to_vec()
}
