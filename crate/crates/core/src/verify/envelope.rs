//! Pointwise derivative envelope of computed orbitals near the nucleus,
//!
//!   |d_1^k phi(r e_1)| <= A^{k+1} k! r^{min(eta - k, 0)},
//!
//! checked along the x1 axis, where d_1^k of a radial function is its k-th
//! radial derivative. This is a necessary condition for the full bound over
//! all multi-indices, not a proof of it.

use crate::error::{Error, Result};
use crate::functions::RadialFunction;
use crate::radial_pde::bootstrap::{derivative_bootstrap, sum_series, SERIES_MAX_TERMS};
use crate::radial_pde::{axis_cartesian_derivatives, origin_series, RadialOde};
use crate::scf::{scf_solve, ScfConfig, ScfState, SystemSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Fitted A on one set of radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeFit {
    pub eta: f64,
    pub radii: Vec<f64>,
    /// A over all orbitals, orders and radii
    pub a: f64,
    /// A per orbital
    pub per_orbital: Vec<f64>,
    /// (orbital, order, radius) of the binding sample
    pub binding: (usize, usize, f64),
}

/// q_k(r) = |phi^{(k)}(r)| r^{max(k - eta, 0)} / k!.
pub fn envelope_quotients(derivs: &[f64], r: f64, eta: f64) -> Vec<f64> {
    let mut fact = 1.0;
    derivs
        .iter()
        .enumerate()
        .map(|(k, d)| {
            if k > 0 {
                fact *= k as f64;
            }
            d.abs() * r.powf((k as f64 - eta).max(0.0)) / fact
        })
        .collect()
}

/// A = max over samples of q_k^{1/(k+1)}, from radial derivatives of each
/// orbital at each radius (`derivs[orbital][radius][order]`).
pub fn fit_pointwise(derivs: &[Vec<Vec<f64>>], radii: &[f64], eta: f64) -> EnvelopeFit {
    let mut a = 0.0f64;
    let mut binding = (0, 0, radii.first().copied().unwrap_or(0.0));
    let mut per_orbital = Vec::with_capacity(derivs.len());
    for (o, per_r) in derivs.iter().enumerate() {
        let mut ao = 0.0f64;
        for (d, &r) in per_r.iter().zip(radii) {
            for (k, q) in envelope_quotients(d, r, eta).into_iter().enumerate() {
                let v = q.powf(1.0 / (k as f64 + 1.0));
                if v > ao {
                    ao = v;
                }
                if v > a {
                    a = v;
                    binding = (o, k, r);
                }
            }
        }
        per_orbital.push(ao);
    }
    EnvelopeFit {
        eta,
        radii: radii.to_vec(),
        a,
        per_orbital,
        binding,
    }
}

/// Axis derivatives of every orbital of a converged state at the given radii,
/// `[orbital][radius][order]`.
pub fn axis_derivatives(
    state: &ScfState,
    spec: &SystemSpec,
    alpha_max: usize,
    radii: &[f64],
) -> Result<Vec<Vec<Vec<f64>>>> {
    let ode = state.ode(spec)?;
    let per_r: Vec<Vec<Vec<f64>>> = radii
        .par_iter()
        .map(|&r| {
            derivative_bootstrap(&ode, &state.orbitals, &state.potentials, alpha_max, r)
                .map(|b| b.derivatives)
        })
        .collect::<Result<_>>()?;
    let n = state.orbitals.len();
    Ok((0..n)
        .map(|o| {
            per_r
                .iter()
                .map(|d| axis_cartesian_derivatives(&d[o]))
                .collect()
        })
        .collect())
}

fn check_eta(eta: f64, epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Hypothesis(format!(
            "potential exponent epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    if !(eta < epsilon) {
        return Err(Error::Hypothesis(format!(
            "need eta < epsilon, got eta = {eta}, epsilon = {epsilon}"
        )));
    }
    Ok(())
}

/// Fitted A for one state on one radius set.
pub fn check_main_envelope(
    state: &ScfState,
    spec: &SystemSpec,
    eta: f64,
    epsilon: f64,
    alpha_max: usize,
    radii: &[f64],
) -> Result<EnvelopeFit> {
    check_eta(eta, epsilon)?;
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::InvalidInput(
            "radii must be positive and nonempty".into(),
        ));
    }
    let d = axis_derivatives(state, spec, alpha_max, radii)?;
    Ok(fit_pointwise(&d, radii, eta))
}

/// 2^{-1}, ..., 2^{-n}.
pub fn dyadic_radii(n: u32) -> Vec<f64> {
    (1..=n).map(|j| 0.5f64.powi(j as i32)).collect()
}

/// Twice as many radii over the same range: 2^{-j/2}, j = 2, ..., 2n + 1.
pub fn doubled_radii(n: u32) -> Vec<f64> {
    (2..=2 * n + 1)
        .map(|j| 0.5f64.powf(j as f64 / 2.0))
        .collect()
}

/// Grid with half the maximal cell width and four more graded cells.
pub fn refined_config(config: &ScfConfig) -> ScfConfig {
    let mut c = *config;
    c.grid.max_width *= 0.5;
    c.grid.cells += 4;
    c
}

/// Relative tolerance of the stability comparisons.
pub const ENVELOPE_STABILITY: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvelopeParams {
    pub eta: f64,
    pub epsilon: f64,
    pub alpha_max: usize,
    /// number of dyadic radii 2^{-1..-n}
    pub radii: u32,
}

impl Default for EnvelopeParams {
    fn default() -> Self {
        Self {
            eta: 0.9,
            epsilon: 0.95,
            alpha_max: 10,
            radii: 10,
        }
    }
}

/// Fits on the base radii, the doubled radii and a refined solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeStudy {
    pub params: EnvelopeParams,
    pub base: EnvelopeFit,
    pub doubled: EnvelopeFit,
    pub refined: EnvelopeFit,
    pub pass: bool,
    pub scope: String,
}

fn within(a: f64, b: f64) -> bool {
    a.is_finite() && b.is_finite() && a > 0.0 && ((b - a) / a).abs() <= ENVELOPE_STABILITY
}

/// Envelope study of an already converged state; the refined state is
/// solved here.
pub fn envelope_study_from(
    state: &ScfState,
    spec: &SystemSpec,
    config: &ScfConfig,
    params: &EnvelopeParams,
) -> Result<EnvelopeStudy> {
    let fit = |s: &ScfState, radii: &[f64]| {
        check_main_envelope(s, spec, params.eta, params.epsilon, params.alpha_max, radii)
    };
    let base_r = dyadic_radii(params.radii);
    let base = fit(state, &base_r)?;
    let doubled = fit(state, &doubled_radii(params.radii))?;
    let fine = scf_solve(spec, &refined_config(config))?;
    let refined = fit(&fine, &base_r)?;
    let pass = within(base.a, doubled.a) && within(base.a, refined.a);
    Ok(EnvelopeStudy {
        params: *params,
        base,
        doubled,
        refined,
        pass,
        scope: "x1-axis derivatives only: a necessary condition of the bound".into(),
    })
}

/// Solves, then runs [`envelope_study_from`].
pub fn envelope_study(
    spec: &SystemSpec,
    config: &ScfConfig,
    params: &EnvelopeParams,
) -> Result<EnvelopeStudy> {
    let state = scf_solve(spec, config)?;
    envelope_study_from(&state, spec, config, params)
}

/// Radial profile given by the origin Taylor series of an orbital; usable
/// inside the radius where the series has converged.
#[derive(Debug, Clone)]
pub struct SeriesProfile {
    coefs: Vec<f64>,
    radius: f64,
}

impl SeriesProfile {
    /// Series of orbital `orbital` of a solved state. Fails if the series
    /// has not converged at `radius` for derivatives up to `max_order`.
    pub fn from_state(
        state: &ScfState,
        ode: &RadialOde,
        orbital: usize,
        radius: f64,
        max_order: usize,
    ) -> Result<Self> {
        if orbital >= state.orbitals.len() {
            return Err(Error::InvalidInput(format!("no orbital {orbital}")));
        }
        let phi0: Vec<f64> = state.orbitals.iter().map(|f| f.value(0.0)).collect();
        let u0: Vec<f64> = state.potentials.iter().map(|f| f.value(0.0)).collect();
        let (a, _) = origin_series(ode, &phi0, &u0, SERIES_MAX_TERMS);
        Self::new(a[orbital].clone(), radius, max_order)
    }

    pub fn new(coefs: Vec<f64>, radius: f64, max_order: usize) -> Result<Self> {
        if sum_series(&coefs, max_order, radius).is_none() {
            return Err(Error::Unstable(format!(
                "origin series not converged at r = {radius}"
            )));
        }
        Ok(Self { coefs, radius })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefs
    }
}

impl RadialFunction for SeriesProfile {
    fn derivatives(&self, r: f64, max_order: usize) -> Vec<f64> {
        match (r <= self.radius)
            .then(|| sum_series(&self.coefs, max_order, r))
            .flatten()
        {
            Some((d, _)) => d,
            None => vec![f64::NAN; max_order + 1],
        }
    }

    /// Odd powers of r are not smooth functions of x.
    fn singular_power(&self) -> Option<f64> {
        self.coefs
            .iter()
            .enumerate()
            .find(|(n, c)| n % 2 == 1 && **c != 0.0)
            .map(|(n, _)| n as f64)
    }

    fn smooth_order(&self) -> u32 {
        self.coefs
            .iter()
            .enumerate()
            .find(|(n, c)| n % 2 == 0 && **c != 0.0)
            .map_or(u32::MAX, |(n, _)| n as u32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quotients_of_exponential() {
        // phi = e^{-r}: |phi^{(k)}| = e^{-r}
        let r: f64 = 0.25;
        let d = vec![(-r).exp(); 5];
        let q = envelope_quotients(&d, r, 0.9);
        assert!((q[0] - (-r).exp()).abs() < 1e-15);
        assert!((q[2] - (-r).exp() * r.powf(1.1) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn radius_sets_cover_the_same_range() {
        let a = dyadic_radii(10);
        let b = doubled_radii(10);
        assert_eq!(b.len(), 2 * a.len());
        assert_eq!(a[0], b[0]);
        assert!(b.last().unwrap() < a.last().unwrap());
    }
}
