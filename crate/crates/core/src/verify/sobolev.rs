//! Interior W^{2,q} estimate for the Poisson problem -Laplace u = 4 pi f,
//!
//!   sum_{|a|<=2} ||D^a u||_{L^q(B_R)} <= C_S (||f||_{L^q(B_{R+1})} + ||u||_{L^q(B_{R+1})}),
//!
//! with C_S estimated on manufactured radial instances. The constant has no
//! closed form; the fitted value is recorded as an external estimate.

use super::elliptic::power_exp_laplacian;
use super::report::{InequalityReport, ReportParams};
use crate::combinatorics::MultiIndex;
use crate::error::{invalid, Result};
use crate::functions::{Field, PowerExp, Radial};
use crate::weights::{weighted_norms, QuadratureOptions, RadialRegion};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Version tag of [`sobolev_family`].
pub const SOBOLEV_FAMILY_VERSION: u32 = 1;

/// Family v1: r^s e^{-c r} for s in {2, 3, 4}, c in {0.5, 1, 2, 4}.
pub fn sobolev_family() -> Vec<PowerExp> {
    let mut out = Vec::new();
    for s in [2.0, 3.0, 4.0] {
        for c in [0.5, 1.0, 2.0, 4.0] {
            out.push(PowerExp::new(1.0, s, c));
        }
    }
    out
}

/// LHS/RHS for one radial u = g(|x|).
pub fn sobolev_ratio(
    g: &PowerExp,
    dim: usize,
    q: f64,
    radius: f64,
    opts: &QuadratureOptions,
) -> Result<f64> {
    if !(q >= 1.0 && q.is_finite()) {
        return invalid(format!("need 1 <= q < inf, got {q}"));
    }
    let u = Radial::new(*g, dim);
    let lap = Radial::new(power_exp_laplacian(g, dim), dim);
    let alphas: Vec<MultiIndex> = (0..=2).flat_map(|m| MultiIndex::of_order(dim, m)).collect();
    let zeros = vec![0.0; alphas.len()];
    let lhs: f64 = weighted_norms(&u, &alphas, &zeros, q, RadialRegion::ball(radius), opts)?
        .iter()
        .sum();
    let outer = RadialRegion::ball(radius + 1.0);
    let zero = [MultiIndex::zero(dim)];
    let u_norm = weighted_norms(&u, &zero, &[0.0], q, outer, opts)?[0];
    let f_norm = weighted_norms(&lap as &dyn Field, &zero, &[0.0], q, outer, opts)?[0] / (4.0 * PI);
    Ok(lhs / (f_norm + u_norm))
}

/// Fitted C_S at exponent q = 3p/2 over the versioned family.
pub fn fit_sobolev_constant(
    dim: usize,
    p: f64,
    radius: f64,
    opts: &QuadratureOptions,
) -> Result<InequalityReport> {
    let q = 1.5 * p;
    let family = sobolev_family();
    let ratios: Vec<f64> = family
        .par_iter()
        .map(|g| sobolev_ratio(g, dim, q, radius, opts))
        .collect::<Result<_>>()?;
    let c_s = ratios.iter().copied().fold(0.0, f64::max);
    Ok(InequalityReport::new(
        "interior_sobolev",
        ratios.len(),
        c_s,
        c_s,
        ReportParams {
            p: Some(p),
            radius: Some(radius),
            ..Default::default()
        },
    )
    .with_value("c_s", c_s)
    .with_note(format!(
        "family v{SOBOLEV_FAMILY_VERSION}: r^s e^(-c r), s in {{2,3,4}}, c in {{0.5,1,2,4}}; q = 3p/2"
    )))
}
