//! Numerical checks of the inequalities and constants behind the weighted
//! analytic regularity estimates, the pointwise envelope of computed
//! orbitals, and the hp-approximation experiment.

pub mod constants;
pub mod elliptic;
pub mod envelope;
pub mod hp;
pub mod imbedding;
pub mod interpolation;
pub mod report;
pub mod sequence;
pub mod sobolev;

pub use constants::{lemma_constants, Constant, ConstantsLedger, Provenance};
pub use elliptic::{check_elliptic_shift, elliptic_suite, manufactured_suite, EllipticParams};
pub use envelope::{check_main_envelope, envelope_study, EnvelopeParams, EnvelopeStudy};
pub use hp::{hp_comparison, hp_convergence_demo, uniform_control, HpParams, HpTable};
pub use imbedding::{check_imbedding, imbedding_suite, ImbeddingParams};
pub use interpolation::{check_interpolation, interpolation_suite, InterpolationParams};
pub use report::{all_pass, reports_summary_csv, reports_to_json, InequalityReport, ReportParams};
pub use sequence::{sequence_grid_suite, sequence_lemma_suite, SequenceGrid, SequenceParams};
pub use sobolev::fit_sobolev_constant;

use crate::error::Result;
use crate::weights::QuadratureOptions;
use serde::{Deserialize, Serialize};

/// Where C_S is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SobolevParams {
    pub dim: usize,
    pub p: f64,
    pub radius: f64,
}

impl Default for SobolevParams {
    fn default() -> Self {
        Self {
            dim: 3,
            p: 6.0,
            radius: 1.0,
        }
    }
}

/// Which suites run, with their parameters; absent entries are skipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteConfig {
    pub interpolation: Option<InterpolationParams>,
    pub elliptic: Option<EllipticParams>,
    pub imbedding: Option<ImbeddingParams>,
    pub sobolev: Option<SobolevParams>,
    pub sequence: Option<SequenceGrid>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            interpolation: Some(InterpolationParams::default()),
            elliptic: Some(EllipticParams::default()),
            imbedding: Some(ImbeddingParams::default()),
            sobolev: Some(SobolevParams::default()),
            sequence: Some(SequenceGrid::default()),
        }
    }
}

/// Reports of every selected suite and the constants assembled from them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub reports: Vec<InequalityReport>,
    pub constants: Option<ConstantsLedger>,
}

/// Runs the selected suites. Fitted C_interp, C_reg and C_S feed the
/// constants of the sequence sweep when those suites ran; otherwise the
/// sweep keeps the values of its base parameters.
pub fn verify_suite(config: &SuiteConfig) -> Result<SuiteOutcome> {
    let mut reports = Vec::new();
    let mut c_interp = None;
    let mut c_reg = None;
    let mut c_s = None;
    if let Some(p) = &config.interpolation {
        let r = interpolation_suite(p, &QuadratureOptions::default())?;
        c_interp = r.values.get("c_interp").copied().filter(|c| *c > 0.0);
        reports.push(r);
    }
    if let Some(p) = &config.elliptic {
        let r = elliptic_suite(&manufactured_suite(), p, &elliptic::elliptic_quadrature())?;
        c_reg = r.values.get("c_reg").copied();
        reports.push(r);
    }
    if let Some(p) = &config.imbedding {
        reports.push(imbedding_suite(p, &elliptic::elliptic_quadrature())?);
    }
    if let Some(p) = &config.sobolev {
        let r = fit_sobolev_constant(p.dim, p.p, p.radius, &QuadratureOptions::default())?;
        c_s = r.values.get("c_s").copied().filter(|c| *c > 0.0);
        reports.push(r);
    }
    let mut constants = None;
    if let Some(grid) = &config.sequence {
        let mut grid = grid.clone();
        if let Some(c) = c_interp {
            grid.base.c_interp = c;
        }
        if let Some(c) = c_reg {
            grid.base.c_reg = c;
        }
        if let Some(c) = c_s {
            grid.base.c_s = c;
        }
        let b = &grid.base;
        constants = Some(
            lemma_constants(b.c_interp, b.c_phi, b.c_v, b.dim, b.p, b.gamma)?
                .with_fitted(b.c_reg, b.c_s),
        );
        reports.extend(sequence_grid_suite(&grid)?);
    }
    Ok(SuiteOutcome { reports, constants })
}
