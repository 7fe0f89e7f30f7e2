//! Weighted imbedding of K^{l+2,p}_gamma into K^{l,inf}_{gamma-d/p},
//!
//!   max_{|a|<=l} ||r^{|a|-gamma+d/p} D^a v||_inf <= C (l+1)^2 ||v||_{K^{l+2,p}_gamma},
//!
//! evaluated on every dyadic annulus 2^{-j-1}R < |x| < 2^{-j}R separately
//! (the constant must not depend on j) and on the whole ball.

use super::report::{InequalityReport, ReportParams};
use crate::combinatorics::MultiIndex;
use crate::error::{Error, Result};
use crate::functions::{AnnulusBump, Field, PowerExp, Radial};
use crate::weights::{dyadic_annulus, weighted_norms, QuadratureOptions, RadialRegion};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImbeddingInstance {
    pub ell: u32,
    pub p: f64,
    pub gamma: f64,
    pub radius: f64,
    /// number of dyadic annuli
    pub annuli: u32,
}

/// Per-annulus and whole-ball values of LHS / ((l+1)^2 RHS).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImbeddingRatios {
    pub per_annulus: Vec<f64>,
    pub global: f64,
}

impl ImbeddingRatios {
    /// Largest per-annulus ratio: the fitted constant.
    pub fn fitted(&self) -> f64 {
        self.per_annulus.iter().copied().fold(0.0, f64::max)
    }
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else if rhs == 0.0 {
        f64::INFINITY
    } else {
        lhs / rhs
    }
}

/// (sup side, L^p side) on a region.
fn sides(
    v: &dyn Field,
    inst: &ImbeddingInstance,
    region: RadialRegion,
    opts: &QuadratureOptions,
) -> Result<(f64, f64)> {
    let dim = v.dim();
    let shift = inst.gamma - dim as f64 / inst.p;
    let low: Vec<MultiIndex> = (0..=inst.ell)
        .flat_map(|m| MultiIndex::of_order(dim, m))
        .collect();
    let exps: Vec<f64> = low.iter().map(|a| a.order() as f64 - shift).collect();
    let sup = weighted_norms(v, &low, &exps, f64::INFINITY, region, opts)?
        .into_iter()
        .fold(0.0, f64::max);
    let high: Vec<MultiIndex> = (0..=inst.ell + 2)
        .flat_map(|m| MultiIndex::of_order(dim, m))
        .collect();
    let exps: Vec<f64> = high.iter().map(|a| a.order() as f64 - inst.gamma).collect();
    let norm = weighted_norms(v, &high, &exps, inst.p, region, opts)?
        .iter()
        .map(|x| x.powf(inst.p))
        .sum::<f64>()
        .powf(1.0 / inst.p);
    Ok((sup, norm))
}

pub fn imbedding_ratios(
    v: &dyn Field,
    inst: &ImbeddingInstance,
    opts: &QuadratureOptions,
) -> Result<ImbeddingRatios> {
    let shift = inst.gamma - v.dim() as f64 / inst.p;
    if !(inst.p >= 2.0 && inst.p.is_finite()) {
        return Err(Error::Hypothesis(format!(
            "imbedding needs 2 <= p < inf, got {}",
            inst.p
        )));
    }
    if shift <= 0.0 {
        return Err(Error::Hypothesis(format!(
            "imbedding needs gamma - d/p > 0, got {shift}"
        )));
    }
    if inst.annuli == 0 || !(inst.radius > 0.0) {
        return Err(Error::InvalidInput(
            "need a positive radius and at least one annulus".into(),
        ));
    }
    let scale = (inst.ell as f64 + 1.0).powi(2);
    let mut per_annulus = Vec::with_capacity(inst.annuli as usize);
    let mut sup = 0.0f64;
    for j in 0..inst.annuli {
        let (s, n) = sides(v, inst, dyadic_annulus(j, inst.radius), opts)?;
        sup = sup.max(s);
        per_annulus.push(ratio(s, scale * n));
    }
    let (_, whole) = sides(v, inst, RadialRegion::ball(inst.radius), opts)?;
    Ok(ImbeddingRatios {
        per_annulus,
        global: ratio(sup, scale * whole),
    })
}

/// Report for one field and instance: the fitted C is the largest
/// per-annulus ratio, and the whole-ball ratio must not exceed it.
pub fn check_imbedding(
    v: &dyn Field,
    inst: &ImbeddingInstance,
    opts: &QuadratureOptions,
) -> Result<InequalityReport> {
    let r = imbedding_ratios(v, inst, opts)?;
    let fitted = r.fitted();
    Ok(InequalityReport::new(
        "imbedding",
        r.per_annulus.len() + 1,
        fitted.max(r.global),
        fitted,
        ReportParams {
            p: Some(inst.p),
            gamma: Some(inst.gamma),
            k: Some(inst.ell),
            rho: None,
            radius: Some(inst.radius),
        },
    )
    .with_value("global_ratio", r.global))
}

/// Version tag of [`imbedding_suite`].
pub const IMBEDDING_SUITE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ImbeddingParams {
    pub dim: usize,
    pub p_values: Vec<f64>,
    /// values of gamma - d/p
    pub shifts: Vec<f64>,
    pub max_ell: u32,
    pub radius: f64,
    pub annuli: u32,
}

impl Default for ImbeddingParams {
    fn default() -> Self {
        Self {
            dim: 3,
            p_values: vec![2.0, 3.0, 6.0],
            shifts: vec![0.1, 0.3, 0.45],
            max_ell: 2,
            radius: 1.0,
            annuli: 16,
        }
    }
}

/// Suite v1: r^s e^{-cr} for s in {0.5, 1, 1.5, 2}, c in {1, 3}, and a bump
/// on the annulus [1/8, 1/4], over every conforming (p, gamma - d/p, l).
/// Fields with s <= gamma - d/p are outside K^{l+2,p}_gamma and not used.
pub fn imbedding_suite(
    params: &ImbeddingParams,
    opts: &QuadratureOptions,
) -> Result<InequalityReport> {
    let dim = params.dim;
    let mut fields: Vec<(Option<f64>, Box<dyn Field>)> = Vec::new();
    for s in [0.5, 1.0, 1.5, 2.0] {
        for c in [1.0, 3.0] {
            fields.push((
                Some(s),
                Box::new(Radial::new(PowerExp::new(1.0, s, c), dim)),
            ));
        }
    }
    fields.push((
        None,
        Box::new(Radial::new(
            AnnulusBump {
                inner: 0.125 * params.radius,
                outer: 0.25 * params.radius,
            },
            dim,
        )),
    ));
    let mut jobs = Vec::new();
    for &p in &params.p_values {
        for &shift in &params.shifts {
            for ell in 0..=params.max_ell {
                for (s, f) in &fields {
                    if s.is_some_and(|s| s <= shift) {
                        continue;
                    }
                    let inst = ImbeddingInstance {
                        ell,
                        p,
                        gamma: shift + dim as f64 / p,
                        radius: params.radius,
                        annuli: params.annuli,
                    };
                    jobs.push((f.as_ref(), inst));
                }
            }
        }
    }
    let reports: Vec<InequalityReport> = jobs
        .par_iter()
        .map(|(f, inst)| check_imbedding(*f, inst, opts))
        .collect::<Result<_>>()?;
    let failures = reports.iter().filter(|r| !r.pass).count();
    let fitted = reports
        .iter()
        .map(|r| r.fitted_constant)
        .fold(0.0, f64::max);
    let worst = reports.iter().map(|r| r.max_ratio).fold(0.0, f64::max);
    let mut report = InequalityReport::new(
        "imbedding",
        reports.iter().map(|r| r.cases).sum(),
        worst,
        fitted,
        ReportParams {
            k: Some(params.max_ell),
            radius: Some(params.radius),
            ..Default::default()
        },
    )
    .with_value("instances", reports.len() as f64)
    .with_note(format!(
        "suite v{IMBEDDING_SUITE_VERSION}: constant fitted per dyadic annulus, whole-ball ratio checked against it"
    ));
    if failures > 0 {
        report = report.fail(format!("{failures} instances exceed their fitted constant"));
    }
    Ok(report)
}
