//! Local weighted elliptic estimate
//!
//!   sum_{|a|=k+1} ||r^{k+1-g} D^a u||_{L^p(B_{R-(j+1)rho})}
//!     <= C_reg ( sum_{|b|=k-1} ||r^{k+1-g} D^b Lap u||_{L^p(B_{R-j rho})}
//!              + rho^{-1} sum_{|a|=k} ||r^{k-g} D^a u||
//!              + rho^{-2} sum_{|a|=k-1} ||r^{k-1-g} D^a u|| ),
//!
//! evaluated on manufactured fields with exact Laplacians.

use super::report::{InequalityReport, ReportParams};
use crate::combinatorics::MultiIndex;
use crate::error::{Error, Result};
use crate::functions::{Field, Polynomial, PowerExp, Radial, RadialFunction};
use crate::weights::{weighted_norms, QuadratureOptions, RadialRegion};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Sum of r^s e^{-c r} terms; closed under the radial Laplacian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerExpSum(pub Vec<PowerExp>);

impl RadialFunction for PowerExpSum {
    fn derivatives(&self, r: f64, max_order: usize) -> Vec<f64> {
        let mut out = vec![0.0; max_order + 1];
        for t in &self.0 {
            for (o, v) in out.iter_mut().zip(t.derivatives(r, max_order)) {
                *o += v;
            }
        }
        out
    }

    fn singular_power(&self) -> Option<f64> {
        self.0
            .iter()
            .filter_map(|t| t.singular_power())
            .min_by(|a, b| a.partial_cmp(b).expect("finite powers"))
    }

    fn smooth_order(&self) -> u32 {
        self.0
            .iter()
            .map(|t| t.smooth_order())
            .min()
            .unwrap_or(u32::MAX)
    }
}

/// Lap(r^s e^{-cr}) = e^{-cr} (s(s+d-2) r^{s-2} - c(2s+d-1) r^{s-1} + c^2 r^s).
pub fn power_exp_laplacian(g: &PowerExp, dim: usize) -> PowerExpSum {
    let (a, s, c) = (g.amplitude, g.power, g.decay);
    let d = dim as f64;
    let terms = [
        PowerExp::new(a * s * (s + d - 2.0), s - 2.0, c),
        PowerExp::new(-a * c * (2.0 * s + d - 1.0), s - 1.0, c),
        PowerExp::new(a * c * c, s, c),
    ];
    PowerExpSum(terms.into_iter().filter(|t| t.amplitude != 0.0).collect())
}

/// Exact Laplacian of a polynomial.
pub fn polynomial_laplacian(p: &Polynomial) -> Polynomial {
    let mut terms = Vec::new();
    for (c, e) in &p.terms {
        for i in 0..p.dim {
            let ei = e.0[i];
            if ei >= 2 {
                let mut f = e.0.clone();
                f[i] -= 2;
                terms.push((c * (ei * (ei - 1)) as f64, f));
            }
        }
    }
    Polynomial::new(p.dim, terms)
}

/// A field together with its Laplacian.
pub enum Manufactured {
    Polynomial {
        name: String,
        u: Polynomial,
        lap: Polynomial,
    },
    Radial {
        name: String,
        u: Radial<PowerExp>,
        lap: Radial<PowerExpSum>,
    },
}

impl Manufactured {
    pub fn polynomial(name: &str, u: Polynomial) -> Self {
        let lap = polynomial_laplacian(&u);
        Self::Polynomial {
            name: name.into(),
            u,
            lap,
        }
    }

    pub fn radial(name: &str, g: PowerExp, dim: usize) -> Self {
        Self::Radial {
            name: name.into(),
            lap: Radial::new(power_exp_laplacian(&g, dim), dim),
            u: Radial::new(g, dim),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Self::Polynomial { name, .. } | Self::Radial { name, .. } => name,
        }
    }

    pub fn field(&self) -> &dyn Field {
        match self {
            Self::Polynomial { u, .. } => u,
            Self::Radial { u, .. } => u,
        }
    }

    pub fn laplacian(&self) -> &dyn Field {
        match self {
            Self::Polynomial { lap, .. } => lap,
            Self::Radial { lap, .. } => lap,
        }
    }
}

/// Version tag of [`manufactured_suite`].
pub const ELLIPTIC_SUITE_VERSION: u32 = 1;

/// Suite v1 in three dimensions: harmonic and non-harmonic polynomials and
/// radial fields with cusps or fractional powers at the origin.
pub fn manufactured_suite() -> Vec<Manufactured> {
    vec![
        Manufactured::polynomial(
            "x1^2-x2^2",
            Polynomial::new(3, vec![(1.0, vec![2, 0, 0]), (-1.0, vec![0, 2, 0])]),
        ),
        Manufactured::polynomial("x1*x2*x3", Polynomial::new(3, vec![(1.0, vec![1, 1, 1])])),
        Manufactured::polynomial(
            "|x|^2",
            Polynomial::new(
                3,
                vec![
                    (1.0, vec![2, 0, 0]),
                    (1.0, vec![0, 2, 0]),
                    (1.0, vec![0, 0, 2]),
                ],
            ),
        ),
        Manufactured::polynomial("x1", Polynomial::new(3, vec![(1.0, vec![1, 0, 0])])),
        Manufactured::polynomial(
            "x1^4+x2^2*x3",
            Polynomial::new(3, vec![(1.0, vec![4, 0, 0]), (1.0, vec![0, 2, 1])]),
        ),
        Manufactured::radial("exp(-r)", PowerExp::new(1.0, 0.0, 1.0), 3),
        Manufactured::radial("r^0.5*exp(-r)", PowerExp::new(1.0, 0.5, 1.0), 3),
        Manufactured::radial("r^1.5*exp(-2r)", PowerExp::new(1.0, 1.5, 2.0), 3),
        Manufactured::radial("r^2*exp(-r/2)", PowerExp::new(1.0, 2.0, 0.5), 3),
    ]
}

/// One instance of the estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticInstance {
    pub k: u32,
    pub j: u32,
    pub rho: f64,
    pub gamma: f64,
    pub p: f64,
    pub radius: f64,
}

impl EllipticInstance {
    fn validate(&self) -> Result<()> {
        if self.k < 1 || self.j < 1 || self.j > self.k {
            return Err(Error::InvalidInput(format!(
                "need 1 <= j <= k, got j = {}, k = {}",
                self.j, self.k
            )));
        }
        let max_rho = self.radius / (2.0 * (self.k as f64 + 1.0));
        if !(self.rho > 0.0 && self.rho <= max_rho * (1.0 + 1e-12)) {
            return Err(Error::InvalidInput(format!(
                "rho must lie in (0, R/(2(k+1))] = (0, {max_rho}], got {}",
                self.rho
            )));
        }
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "p must lie in (1, inf), got {}",
                self.p
            )));
        }
        Ok(())
    }
}

/// LHS and the three right-hand groups (without C_reg).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticTerms {
    pub lhs: f64,
    pub laplacian: f64,
    pub first: f64,
    pub zeroth: f64,
}

impl EllipticTerms {
    pub fn rhs(&self) -> f64 {
        self.laplacian + self.first + self.zeroth
    }

    pub fn ratio(&self) -> f64 {
        if self.lhs == 0.0 {
            0.0
        } else if self.rhs() == 0.0 {
            f64::INFINITY
        } else {
            self.lhs / self.rhs()
        }
    }
}

fn sum_of_norms(
    f: &dyn Field,
    order: u32,
    exponent: f64,
    p: f64,
    region: RadialRegion,
    opts: &QuadratureOptions,
) -> Result<f64> {
    let alphas = MultiIndex::of_order(f.dim(), order);
    let exps = vec![exponent; alphas.len()];
    Ok(weighted_norms(f, &alphas, &exps, p, region, opts)?
        .iter()
        .sum())
}

/// Evaluates both sides of the estimate for `u` with Laplacian `lap`.
pub fn elliptic_terms(
    u: &dyn Field,
    lap: &dyn Field,
    inst: &EllipticInstance,
    opts: &QuadratureOptions,
) -> Result<EllipticTerms> {
    inst.validate()?;
    let k = inst.k;
    let kf = k as f64;
    let inner = RadialRegion::ball(inst.radius - (inst.j as f64 + 1.0) * inst.rho);
    let outer = RadialRegion::ball(inst.radius - inst.j as f64 * inst.rho);
    let lhs = sum_of_norms(u, k + 1, kf + 1.0 - inst.gamma, inst.p, inner, opts)?;
    let laplacian = sum_of_norms(lap, k - 1, kf + 1.0 - inst.gamma, inst.p, outer, opts)?;
    let first = sum_of_norms(u, k, kf - inst.gamma, inst.p, outer, opts)? / inst.rho;
    let zeroth =
        sum_of_norms(u, k - 1, kf - 1.0 - inst.gamma, inst.p, outer, opts)? / (inst.rho * inst.rho);
    Ok(EllipticTerms {
        lhs,
        laplacian,
        first,
        zeroth,
    })
}

/// Ratio LHS / RHS of one instance.
pub fn check_elliptic_shift(
    u: &dyn Field,
    lap: &dyn Field,
    inst: &EllipticInstance,
    opts: &QuadratureOptions,
) -> Result<f64> {
    Ok(elliptic_terms(u, lap, inst, opts)?.ratio())
}

/// Parameter grid of the suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EllipticParams {
    /// (p, gamma) pairs
    pub weights: Vec<(f64, f64)>,
    pub max_k: u32,
    pub radius: f64,
    /// rho values as fractions of R/(2(k+1))
    pub rho_fractions: Vec<f64>,
}

impl Default for EllipticParams {
    fn default() -> Self {
        Self {
            weights: vec![(2.0, 0.5), (2.0, 1.5), (3.0, 1.0), (6.0, 0.6)],
            max_k: 3,
            radius: 1.0,
            rho_fractions: vec![1.0, 0.5],
        }
    }
}

/// Quadrature for the suite: the fields are smooth away from the origin, so a
/// coarser rule than the default keeps the suite fast.
pub fn elliptic_quadrature() -> QuadratureOptions {
    QuadratureOptions {
        levels: 40,
        gauss_points: 12,
        sphere_points: 10,
    }
}

/// Runs every field of the suite over the parameter grid; the fitted C_reg
/// is the largest ratio floored at 1.
pub fn elliptic_suite(
    suite: &[Manufactured],
    params: &EllipticParams,
    opts: &QuadratureOptions,
) -> Result<InequalityReport> {
    let mut instances = Vec::new();
    for &(p, gamma) in &params.weights {
        for k in 1..=params.max_k {
            for j in 1..=k {
                for &frac in &params.rho_fractions {
                    instances.push(EllipticInstance {
                        k,
                        j,
                        rho: frac * params.radius / (2.0 * (k as f64 + 1.0)),
                        gamma,
                        p,
                        radius: params.radius,
                    });
                }
            }
        }
    }
    let jobs: Vec<(&Manufactured, EllipticInstance)> = suite
        .iter()
        .flat_map(|m| instances.iter().map(move |i| (m, *i)))
        .collect();
    // a field outside the weighted space of an instance has a divergent norm
    // there; such pairs are not instances of the estimate
    let outcomes: Vec<Option<f64>> = jobs
        .par_iter()
        .map(
            |(m, inst)| match check_elliptic_shift(m.field(), m.laplacian(), inst, opts) {
                Ok(r) => Ok(Some(r)),
                Err(Error::Divergent(_)) => Ok(None),
                Err(e) => Err(e),
            },
        )
        .collect::<Result<_>>()?;
    let skipped = outcomes.iter().filter(|o| o.is_none()).count();
    let (jobs, ratios): (Vec<_>, Vec<f64>) = jobs
        .into_iter()
        .zip(outcomes)
        .filter_map(|(j, o)| o.map(|r| (j, r)))
        .unzip();
    let (worst_idx, worst) =
        ratios
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |b, (i, &r)| if r > b.1 { (i, r) } else { b });
    let c_reg = worst.max(1.0);
    let mut report = InequalityReport::new(
        "elliptic_shift",
        ratios.len(),
        worst,
        c_reg,
        ReportParams {
            k: Some(params.max_k),
            radius: Some(params.radius),
            ..Default::default()
        },
    )
    .with_value("c_reg", c_reg)
    .with_value("skipped_nonconforming", skipped as f64)
    .with_note(format!(
        "suite v{ELLIPTIC_SUITE_VERSION}: {} fields x {} instances",
        suite.len(),
        instances.len()
    ));
    if !ratios.is_empty() {
        let (m, inst) = &jobs[worst_idx];
        report = report.with_note(format!(
            "largest ratio for {} at k = {}, j = {}, rho = {}, p = {}, gamma = {}",
            m.name(),
            inst.k,
            inst.j,
            inst.rho,
            inst.p,
            inst.gamma
        ));
    }
    Ok(report)
}
