//! Weighted L^{3p} interpolation estimate
//!
//!   ||r^{(2-g)/3+|b|} D^b u||_{3p} <= C ||r^{|b|-g} D^b u||_p^{1-theta}
//!       { (|b|+1)^theta ||r^{|b|-g} D^b u||_p^theta
//!         + sum_i ||r^{|b|+1-g} D^b d_i u||_p^theta },   theta = 2d/(3p),
//!
//! checked on a fixed family of radial test functions over a ball B_R.

use super::report::{InequalityReport, ReportParams};
use crate::combinatorics::MultiIndex;
use crate::error::{Error, Result};
use crate::functions::{Field, PowerExp, Radial};
use crate::weights::{weighted_norms, QuadratureOptions, RadialRegion};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InterpolationParams {
    pub dim: usize,
    pub p: f64,
    pub gamma: f64,
    /// largest |beta|
    pub max_order: u32,
    pub radius: f64,
}

impl Default for InterpolationParams {
    fn default() -> Self {
        Self {
            dim: 3,
            p: 6.0,
            gamma: 0.5,
            max_order: 2,
            radius: 1.0,
        }
    }
}

impl InterpolationParams {
    pub fn theta(&self) -> f64 {
        2.0 / 3.0 * self.dim as f64 / self.p
    }

    fn validate(&self) -> Result<()> {
        let d = self.dim as f64;
        if !(2..=3).contains(&self.dim) {
            return Err(Error::InvalidInput(format!(
                "dimension must be 2 or 3, got {}",
                self.dim
            )));
        }
        if !(self.p.is_finite() && self.p >= 2.0 * d / 3.0) {
            return Err(Error::Hypothesis(format!(
                "interpolation estimate needs p >= 2d/3, got p = {}",
                self.p
            )));
        }
        if self.gamma - d / self.p < -2.0 / 3.0 {
            return Err(Error::Hypothesis(format!(
                "interpolation estimate needs gamma - d/p >= -2/3, got {}",
                self.gamma - d / self.p
            )));
        }
        if !(self.radius > 0.0 && self.radius <= 1.0) {
            return Err(Error::Hypothesis(format!(
                "ball must lie in the unit ball, got R = {}",
                self.radius
            )));
        }
        Ok(())
    }

    fn report_params(&self) -> ReportParams {
        ReportParams {
            p: Some(self.p),
            gamma: Some(self.gamma),
            k: Some(self.max_order),
            rho: None,
            radius: Some(self.radius),
        }
    }
}

/// Version tag of [`interpolation_family`].
pub const INTERPOLATION_FAMILY_VERSION: u32 = 1;

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Family v1: r^s e^{-c r} for s in linspace(0.1, 2, 10), c in linspace(0.5, 4, 5).
pub fn interpolation_family() -> Vec<PowerExp> {
    let mut out = Vec::new();
    for s in linspace(0.1, 2.0, 10) {
        for c in linspace(0.5, 4.0, 5) {
            out.push(PowerExp::new(1.0, s, c));
        }
    }
    out
}

/// Extension used for the stability check: midpoints of the v1 parameter grid.
pub fn interpolation_family_extension() -> Vec<PowerExp> {
    let mid = |v: Vec<f64>| -> Vec<f64> { v.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect() };
    let mut out = Vec::new();
    for s in mid(linspace(0.1, 2.0, 10)) {
        for c in mid(linspace(0.5, 4.0, 5)) {
            out.push(PowerExp::new(1.0, s, c));
        }
    }
    out
}

/// LHS/RHS for every beta with |beta| <= max_order. A vanishing LHS gives 0.
pub fn interpolation_ratios(
    f: &dyn Field,
    params: &InterpolationParams,
    opts: &QuadratureOptions,
) -> Result<Vec<(MultiIndex, f64)>> {
    params.validate()?;
    let dim = f.dim();
    let theta = params.theta();
    let region = RadialRegion::ball(params.radius);
    let k = params.max_order;
    let low: Vec<MultiIndex> = (0..=k).flat_map(|m| MultiIndex::of_order(dim, m)).collect();
    let all: Vec<MultiIndex> = (0..=k + 1)
        .flat_map(|m| MultiIndex::of_order(dim, m))
        .collect();
    let exps_p: Vec<f64> = all
        .iter()
        .map(|a| a.order() as f64 - params.gamma)
        .collect();
    let norms_p = weighted_norms(f, &all, &exps_p, params.p, region, opts)?;
    let exps_3p: Vec<f64> = low
        .iter()
        .map(|a| (2.0 - params.gamma) / 3.0 + a.order() as f64)
        .collect();
    let norms_3p = weighted_norms(f, &low, &exps_3p, 3.0 * params.p, region, opts)?;
    let lookup = |a: &MultiIndex| -> f64 {
        norms_p[all.iter().position(|b| b == a).expect("alpha enumerated")]
    };
    let mut out = Vec::with_capacity(low.len());
    for (beta, lhs) in low.iter().zip(&norms_3p) {
        let nb = lookup(beta);
        let grad: f64 = (0..dim)
            .map(|i| lookup(&beta.add(&MultiIndex::unit(dim, i))).powf(theta))
            .sum();
        let rhs = nb.powf(1.0 - theta)
            * ((beta.order() as f64 + 1.0).powf(theta) * nb.powf(theta) + grad);
        let ratio = if *lhs == 0.0 {
            0.0
        } else if rhs == 0.0 {
            f64::INFINITY
        } else {
            lhs / rhs
        };
        out.push((beta.clone(), ratio));
    }
    Ok(out)
}

/// Fits C_interp as the largest ratio over `family`; every ratio over
/// `extension` must stay below it (zero violations).
pub fn check_interpolation(
    family: &[&dyn Field],
    extension: &[&dyn Field],
    params: &InterpolationParams,
    opts: &QuadratureOptions,
) -> Result<InequalityReport> {
    params.validate()?;
    let worst = |fs: &[&dyn Field]| -> Result<(f64, usize)> {
        let per: Vec<Vec<(MultiIndex, f64)>> = fs
            .par_iter()
            .map(|f| interpolation_ratios(*f, params, opts))
            .collect::<Result<_>>()?;
        let cases = per.iter().map(|v| v.len()).sum();
        let m = per.iter().flatten().map(|(_, r)| *r).fold(0.0, f64::max);
        Ok((m, cases))
    };
    let (fitted, base_cases) = worst(family)?;
    let (ext, ext_cases) = if extension.is_empty() {
        (0.0, 0)
    } else {
        worst(extension)?
    };
    let report = InequalityReport::new(
        "interpolation",
        base_cases + ext_cases,
        fitted.max(ext),
        fitted,
        params.report_params(),
    )
    .with_value("c_interp", fitted)
    .with_value("extension_max_ratio", ext);
    Ok(report)
}

/// Runs the versioned family with its extension in dimension `params.dim`.
pub fn interpolation_suite(
    params: &InterpolationParams,
    opts: &QuadratureOptions,
) -> Result<InequalityReport> {
    let base: Vec<Radial<PowerExp>> = interpolation_family()
        .into_iter()
        .map(|g| Radial::new(g, params.dim))
        .collect();
    let ext: Vec<Radial<PowerExp>> = interpolation_family_extension()
        .into_iter()
        .map(|g| Radial::new(g, params.dim))
        .collect();
    let base: Vec<&dyn Field> = base.iter().map(|f| f as &dyn Field).collect();
    let ext: Vec<&dyn Field> = ext.iter().map(|f| f as &dyn Field).collect();
    Ok(check_interpolation(&base, &ext, params, opts)?
        .with_note(format!("family v{INTERPOLATION_FAMILY_VERSION}: r^s e^(-c r), s in [0.1, 2] x10, c in [0.5, 4] x5")))
}
