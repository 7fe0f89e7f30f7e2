//! External potentials, their derivative oracles, and sampled certification
//! of the weighted analytic bound sup r^{2-eps+|alpha|} |d^alpha V| <= C_V A_V^{|alpha|} |alpha|!.

use crate::cartesian::RadialCartesian;
use crate::combinatorics::{ln_factorial, MultiIndex};
use crate::error::{invalid, Error, Result};
use crate::jet::Jet;
use crate::weights::{distance, weight_eval, SingularSet};
use serde::{Deserialize, Serialize};

/// Derivative access to a potential on R^d.
pub trait PotentialOracle: Sync {
    fn dim(&self) -> usize;

    /// d^alpha V(x) for each alpha.
    fn partials(&self, x: &[f64], alphas: &[MultiIndex], out: &mut [f64]);

    /// m-th derivative of s -> V(x + s w) at s = 0, for a unit vector w.
    fn directional(&self, x: &[f64], w: &[f64], m: usize) -> f64;
}

/// Radial profile of one term attached to a center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// coefficient * rho^exponent
    Power { coefficient: f64, exponent: f64 },
}

impl Profile {
    fn jet(&self, rho: &Jet) -> Jet {
        match *self {
            Profile::Power {
                coefficient,
                exponent,
            } => {
                if exponent == 0.0 {
                    Jet::constant(coefficient, rho.order())
                } else {
                    rho.powf(exponent).scale(coefficient)
                }
            }
        }
    }

    fn radial_derivatives(&self, rho: f64, m: usize) -> Vec<f64> {
        match *self {
            Profile::Power {
                coefficient,
                exponent,
            } if exponent == -1.0 => (0..=m)
                .map(|k| coulomb_radial_derivative(rho, k as u32, -coefficient))
                .collect(),
            _ => self.jet(&Jet::var(rho, m)).derivatives(),
        }
    }
}

/// Potentials understood by the solver and the certifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    /// V = -sum Z_i / |x - c_i|
    Coulomb {
        charges: Vec<f64>,
        centers: Vec<Vec<f64>>,
    },
    /// V = strength |x - c|^2
    Harmonic { strength: f64, center: Vec<f64> },
    /// V = coefficient |x - c|^exponent
    Power {
        coefficient: f64,
        exponent: f64,
        center: Vec<f64>,
    },
    /// V = value
    Constant { value: f64, dim: usize },
}

/// Single-center potential -Z/r + sum_n smooth[n] r^n used by the radial solvers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralPotential {
    pub charge: f64,
    pub smooth: Vec<f64>,
}

impl CentralPotential {
    pub fn coulomb(charge: f64) -> Self {
        Self {
            charge,
            smooth: vec![],
        }
    }

    pub fn harmonic(strength: f64) -> Self {
        Self {
            charge: 0.0,
            smooth: vec![0.0, 0.0, strength],
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        let mut v = 0.0;
        for c in self.smooth.iter().rev() {
            v = v * r + c;
        }
        v - self.charge / r
    }

    /// r * V(r) as a polynomial: -Z + sum smooth[n] r^{n+1}; bounded near 0.
    pub fn times_r(&self, r: f64) -> f64 {
        r * self.value_smooth(r) - self.charge
    }

    pub fn value_smooth(&self, r: f64) -> f64 {
        self.smooth.iter().rev().fold(0.0, |acc, c| acc * r + c)
    }

    /// Derivatives of V at r > 0 up to order m.
    pub fn derivatives(&self, r: f64, m: usize) -> Vec<f64> {
        (0..=m)
            .map(|k| {
                let mut v = coulomb_radial_derivative(r, k as u32, self.charge);
                for (n, c) in self.smooth.iter().enumerate() {
                    if n >= k {
                        let ff: f64 = (0..k).map(|i| (n - i) as f64).product();
                        v += c * ff * r.powi((n - k) as i32);
                    }
                }
                v
            })
            .collect()
    }

    /// Lower bound of the smooth part on [0, r_max].
    pub fn smooth_lower_bound(&self, r_max: f64) -> f64 {
        // coarse sampling plus a Lipschitz margin keeps this simple and safe
        let n = 2000;
        let lip: f64 = self
            .smooth
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| (k as f64 * c * r_max.powi(k as i32 - 1)).abs())
            .sum();
        let h = r_max / n as f64;
        (0..=n)
            .map(|i| self.value_smooth(i as f64 * h))
            .fold(f64::INFINITY, f64::min)
            - lip * h
    }
}

impl PotentialSpec {
    pub fn dim(&self) -> usize {
        match self {
            PotentialSpec::Coulomb { centers, .. } => centers.first().map_or(3, Vec::len),
            PotentialSpec::Harmonic { center, .. } | PotentialSpec::Power { center, .. } => {
                center.len()
            }
            PotentialSpec::Constant { dim, .. } => *dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PotentialSpec::Coulomb { charges, centers } => {
                if charges.len() != centers.len() || charges.is_empty() {
                    return invalid("coulomb potential needs one charge per center");
                }
                if centers.iter().any(|c| c.len() != centers[0].len()) {
                    return invalid("coulomb centers have different dimensions");
                }
            }
            PotentialSpec::Constant { dim, .. } if *dim == 0 => {
                return invalid("dimension must be positive")
            }
            _ => {}
        }
        Ok(())
    }

    /// Centers of the singular set (the constant potential has none).
    pub fn centers(&self) -> Vec<Vec<f64>> {
        match self {
            PotentialSpec::Coulomb { centers, .. } => centers.clone(),
            PotentialSpec::Harmonic { center, .. } | PotentialSpec::Power { center, .. } => {
                vec![center.clone()]
            }
            PotentialSpec::Constant { dim, .. } => vec![vec![0.0; *dim]],
        }
    }

    fn terms(&self) -> Vec<(Vec<f64>, Profile)> {
        match self {
            PotentialSpec::Coulomb { charges, centers } => centers
                .iter()
                .zip(charges)
                .map(|(c, z)| {
                    (
                        c.clone(),
                        Profile::Power {
                            coefficient: -z,
                            exponent: -1.0,
                        },
                    )
                })
                .collect(),
            PotentialSpec::Harmonic { strength, center } => {
                vec![(
                    center.clone(),
                    Profile::Power {
                        coefficient: *strength,
                        exponent: 2.0,
                    },
                )]
            }
            PotentialSpec::Power {
                coefficient,
                exponent,
                center,
            } => {
                vec![(
                    center.clone(),
                    Profile::Power {
                        coefficient: *coefficient,
                        exponent: *exponent,
                    },
                )]
            }
            PotentialSpec::Constant { value, dim } => {
                vec![(
                    vec![0.0; *dim],
                    Profile::Power {
                        coefficient: *value,
                        exponent: 0.0,
                    },
                )]
            }
        }
    }

    /// The single-center radial form, when there is one.
    pub fn to_central(&self) -> Result<CentralPotential> {
        match self {
            PotentialSpec::Coulomb { charges, .. } if charges.len() == 1 => {
                Ok(CentralPotential::coulomb(charges[0]))
            }
            PotentialSpec::Harmonic { strength, .. } => Ok(CentralPotential::harmonic(*strength)),
            PotentialSpec::Constant { value, .. } => Ok(CentralPotential {
                charge: 0.0,
                smooth: vec![*value],
            }),
            PotentialSpec::Power {
                coefficient,
                exponent,
                ..
            } => {
                if *exponent == -1.0 {
                    Ok(CentralPotential::coulomb(-coefficient))
                } else if *exponent >= 0.0 && exponent.fract() == 0.0 {
                    let mut smooth = vec![0.0; *exponent as usize + 1];
                    smooth[*exponent as usize] = *coefficient;
                    Ok(CentralPotential {
                        charge: 0.0,
                        smooth,
                    })
                } else {
                    invalid(format!(
                        "|x|^{exponent} has no Coulomb-plus-polynomial radial form"
                    ))
                }
            }
            PotentialSpec::Coulomb { .. } => {
                invalid("the radial solvers handle a single center only")
            }
        }
    }
}

impl PotentialOracle for PotentialSpec {
    fn dim(&self) -> usize {
        PotentialSpec::dim(self)
    }

    fn partials(&self, x: &[f64], alphas: &[MultiIndex], out: &mut [f64]) {
        out[..alphas.len()].fill(0.0);
        let max_order = alphas.iter().map(|a| a.order()).max().unwrap_or(0) as usize;
        let tables: Vec<RadialCartesian> = (0..=max_order)
            .map(|k| RadialCartesian::new(x.len(), k))
            .collect();
        for (c, profile) in self.terms() {
            let y: Vec<f64> = x.iter().zip(&c).map(|(a, b)| a - b).collect();
            let rho = distance(x, &c);
            let w: Vec<f64> = y.iter().map(|v| v / rho).collect();
            let g = profile.radial_derivatives(rho, max_order);
            for (alpha, o) in alphas.iter().zip(out.iter_mut()) {
                let k = alpha.order() as usize;
                let t = &tables[k];
                let pos = t
                    .alphas()
                    .iter()
                    .position(|a| a == alpha)
                    .expect("alpha in table");
                let q = t.angular(&w);
                let mut all = vec![0.0; t.alphas().len()];
                t.combine(rho, &g[..=k], &q, &mut all);
                *o += all[pos];
            }
        }
    }

    fn directional(&self, x: &[f64], w: &[f64], m: usize) -> f64 {
        let s = Jet::var(0.0, m);
        self.terms()
            .iter()
            .map(|(c, profile)| {
                // |x + s w - c| = sqrt(|y|^2 + 2 (y.w) s + s^2) for unit w
                let y: Vec<f64> = x.iter().zip(c).map(|(a, b)| a - b).collect();
                let yy: f64 = y.iter().map(|v| v * v).sum();
                let yw: f64 = y.iter().zip(w).map(|(a, b)| a * b).sum();
                let quad = &(&Jet::constant(yy, m) + &s.scale(2.0 * yw)) + &(&s * &s);
                let rho = quad.powf(0.5);
                profile.jet(&rho).derivatives()[m]
            })
            .sum()
    }
}

/// d^m/dr^m (-Z/r) = -Z (-1)^m m! r^{-1-m}.
pub fn coulomb_radial_derivative(r: f64, m: u32, charge: f64) -> f64 {
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    -charge * sign * (ln_factorial(m as u64) - (m as f64 + 1.0) * r.ln()).exp()
}

/// Where the certifier samples: radii as fractions of the blend length D,
/// unit directions, and the order up to which all mixed partials are used
/// (above it only directional derivatives along the sample rays).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub radius_fractions: Vec<f64>,
    pub directions: Vec<Vec<f64>>,
    pub tensor_order_cap: u32,
}

impl SamplePlan {
    /// Radii 2^{-1}, ..., 2^{-20} times D along coordinate and diagonal rays.
    pub fn standard(dim: usize) -> Self {
        Self::with_levels(dim, 1, 20)
    }

    pub fn with_levels(dim: usize, first: i32, last: i32) -> Self {
        let radius_fractions = (first..=last).map(|j| 0.5f64.powi(j)).collect();
        let mut directions = Vec::new();
        let n = 3usize.pow(dim as u32);
        for code in 0..n {
            let mut v = Vec::with_capacity(dim);
            let mut c = code;
            for _ in 0..dim {
                v.push((c % 3) as f64 - 1.0);
                c /= 3;
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                directions.push(v.iter().map(|x| x / norm).collect());
            }
        }
        Self {
            radius_fractions,
            directions,
            tensor_order_cap: 4,
        }
    }
}

/// Outcome of the sampled certification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CertificateStatus {
    Certified,
    /// weighted derivatives of this order grow toward a center like r^slope
    Unbounded {
        order: u32,
        slope: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub epsilon: f64,
    pub c_v: f64,
    pub a_v: f64,
    pub max_order: u32,
    /// sup over samples of r^{2-eps+m} |d^alpha V| for each order m
    pub sampled_sup: Vec<f64>,
    pub status: CertificateStatus,
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        self.status == CertificateStatus::Certified
    }
}

/// Slope below which growth toward a center is reported as unbounded.
const GROWTH_SLOPE: f64 = -0.05;

/// Least-squares slope of ln y against ln x.
fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Certifies the weighted analytic bound on the sample plan. C_V is the
/// order-zero bound; A_V is the smallest constant covering every sampled
/// order 1..=max_order given that C_V.
pub fn certify_weighted_analytic(
    v: &dyn PotentialOracle,
    set: &SingularSet,
    epsilon: f64,
    max_order: u32,
    plan: &SamplePlan,
) -> Result<Certificate> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return invalid(format!("epsilon must lie in (0, 1], got {epsilon}"));
    }
    if plan.radius_fractions.len() < 3 || plan.directions.is_empty() {
        return invalid("sample plan needs at least three radii and one direction");
    }
    let dim = v.dim();
    if set.dim() != dim || plan.directions.iter().any(|w| w.len() != dim) {
        return invalid("potential, singular set and sample directions disagree on the dimension");
    }
    let mut radii = plan.radius_fractions.clone();
    radii.sort_by(|a, b| b.partial_cmp(a).expect("finite radii"));
    // per order, per radius: sup over centers, directions and multi-indices
    let orders = (max_order + 1) as usize;
    let mut profile = vec![vec![0.0f64; radii.len()]; orders];
    let alphas_by_order: Vec<Vec<MultiIndex>> = (0..=plan.tensor_order_cap.min(max_order))
        .map(|k| MultiIndex::of_order(dim, k))
        .collect();
    let mut buf = Vec::new();
    for c in &set.centers {
        for (ir, &frac) in radii.iter().enumerate() {
            for w in &plan.directions {
                let x: Vec<f64> = c
                    .iter()
                    .zip(w)
                    .map(|(ci, wi)| ci + frac * set.blend * wi)
                    .collect();
                let r = weight_eval(&x, set);
                for (m, prof) in profile.iter_mut().enumerate() {
                    let sup = if m as u32 <= plan.tensor_order_cap {
                        let alphas = &alphas_by_order[m];
                        buf.resize(alphas.len(), 0.0);
                        v.partials(&x, alphas, &mut buf);
                        buf.iter().fold(0.0f64, |acc, d| acc.max(d.abs()))
                    } else {
                        v.directional(&x, w, m).abs()
                    };
                    let weighted = r.powf(2.0 - epsilon + m as f64) * sup;
                    if !weighted.is_finite() {
                        return Err(Error::Overflow(format!(
                            "non-finite derivative of order {m} at {x:?}"
                        )));
                    }
                    prof[ir] = prof[ir].max(weighted);
                }
            }
        }
    }
    let sampled_sup: Vec<f64> = profile
        .iter()
        .map(|p| p.iter().copied().fold(0.0, f64::max))
        .collect();
    // growth test on the innermost radii
    let tail = 5.min(radii.len());
    let inner_r = &radii[radii.len() - tail..];
    let mut status = CertificateStatus::Certified;
    for (m, prof) in profile.iter().enumerate() {
        let inner = &prof[prof.len() - tail..];
        if inner.iter().all(|v| *v > 0.0) {
            let slope = log_slope(inner_r, inner);
            if slope < GROWTH_SLOPE {
                status = CertificateStatus::Unbounded {
                    order: m as u32,
                    slope,
                };
                break;
            }
        }
    }
    let c_v = sampled_sup[0];
    let mut a_v = 0.0f64;
    for (m, &s) in sampled_sup.iter().enumerate().skip(1) {
        if s == 0.0 {
            continue;
        }
        if c_v == 0.0 {
            return Err(Error::Hypothesis(
                "potential vanishes on the samples but its derivatives do not".into(),
            ));
        }
        let a = ((s / c_v).ln() - ln_factorial(m as u64)) / m as f64;
        a_v = a_v.max(a.exp());
    }
    Ok(Certificate {
        epsilon,
        c_v,
        a_v,
        max_order,
        sampled_sup,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coulomb_derivatives() {
        assert!((coulomb_radial_derivative(0.5, 0, 1.0) + 2.0).abs() < 1e-14);
        assert!((coulomb_radial_derivative(0.5, 1, 1.0) - 4.0).abs() < 1e-13);
        assert!((coulomb_radial_derivative(2.0, 3, 2.0) - 2.0 * 6.0 / 16.0).abs() < 1e-14);
    }

    #[test]
    fn central_form() {
        let v = CentralPotential {
            charge: 2.0,
            smooth: vec![1.0, 0.0, 3.0],
        };
        let d = v.derivatives(0.5, 2);
        assert!((d[0] - (1.0 + 0.75 - 4.0)).abs() < 1e-14);
        assert!((d[1] - (3.0 + 8.0)).abs() < 1e-13);
        assert!((d[2] - (6.0 - 32.0)).abs() < 1e-12);
    }
}
