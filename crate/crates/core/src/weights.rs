//! Distance weight to a finite singular set, weighted Kondrat'ev seminorms,
//! and factorial-growth envelopes of seminorm sequences.

use crate::cartesian::RadialCartesian;
use crate::combinatorics::{ln_factorial, MultiIndex};
use crate::error::{invalid, Error, Result};
use crate::functions::Field;
use crate::quadrature::{gauss_legendre, CompensatedSum};
use crate::sphere::SphereRule;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Point singularities with the blending length D of the weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularSet {
    pub centers: Vec<Vec<f64>>,
    pub blend: f64,
}

impl SingularSet {
    /// Requires D > 0, equal-dimension centers, and pairwise separation >= 4D.
    pub fn new(centers: Vec<Vec<f64>>, blend: f64) -> Result<Self> {
        if !(blend > 0.0 && blend.is_finite()) {
            return invalid(format!("blend length must be positive, got {blend}"));
        }
        if centers.is_empty() {
            return invalid("singular set needs at least one center");
        }
        let d = centers[0].len();
        if centers.iter().any(|c| c.len() != d) {
            return invalid("centers have different dimensions");
        }
        for i in 0..centers.len() {
            for j in i + 1..centers.len() {
                let dist = distance(&centers[i], &centers[j]);
                if dist < 4.0 * blend {
                    return invalid(format!(
                        "centers {i} and {j} are {dist} apart, below the required 4D = {}",
                        4.0 * blend
                    ));
                }
            }
        }
        Ok(Self { centers, blend })
    }

    pub fn dim(&self) -> usize {
        self.centers[0].len()
    }
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Blend on D <= rho <= 2D: quintic Hermite in t = (rho - D)/D joining the
/// distance (value D, slope 1, zero curvature) to the constant 1.
fn blend(t: f64, d: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    let h0 = 1.0 - 10.0 * t3 + 15.0 * t3 * t - 6.0 * t3 * t2;
    let h1 = t - 6.0 * t3 + 8.0 * t3 * t - 3.0 * t3 * t2;
    let h5 = 10.0 * t3 - 15.0 * t3 * t + 6.0 * t3 * t2;
    d * h0 + d * h1 + h5
}

/// The weight r(x): distance to the nearest center inside B_D, 1 outside the
/// balls B_{2D}, and a C^2 blend in between.
pub fn weight_eval(x: &[f64], set: &SingularSet) -> f64 {
    let rho = set
        .centers
        .iter()
        .map(|c| distance(x, c))
        .fold(f64::INFINITY, f64::min);
    let d = set.blend;
    if rho <= d {
        rho
    } else if rho >= 2.0 * d {
        1.0
    } else {
        blend((rho - d) / d, d)
    }
}

/// A ball (inner = 0) or annulus centered at a singular point. Inside B_D the
/// weight equals the distance to the center, which is what the norms use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialRegion {
    pub inner: f64,
    pub outer: f64,
}

impl RadialRegion {
    pub fn ball(radius: f64) -> Self {
        Self {
            inner: 0.0,
            outer: radius,
        }
    }

    pub fn annulus(inner: f64, outer: f64) -> Self {
        Self { inner, outer }
    }

    fn validate(&self) -> Result<()> {
        if !(self.inner >= 0.0 && self.outer > self.inner && self.outer.is_finite()) {
            return invalid(format!("bad region [{}, {}]", self.inner, self.outer));
        }
        Ok(())
    }
}

/// Dyadic annulus 2^{-j-1} R <= |x - c| <= 2^{-j} R.
pub fn dyadic_annulus(j: u32, radius: f64) -> RadialRegion {
    let outer = radius * 0.5f64.powi(j as i32);
    RadialRegion::annulus(0.5 * outer, outer)
}

/// Kondrat'ev seminorm parameters: integrability p (may be infinite),
/// weight exponent gamma, derivative order k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub p: f64,
    pub gamma: f64,
    pub order: u32,
}

/// Resolution of the radial and angular quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureOptions {
    /// geometric (factor 1/2) cells between the origin and the outer radius
    pub levels: usize,
    pub gauss_points: usize,
    pub sphere_points: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            levels: 48,
            gauss_points: 16,
            sphere_points: 12,
        }
    }
}

/// Radial nodes and dr-weights on a region. `origin_exponent` is the power
/// a of the integrand r^a near the origin, used to map the innermost cell.
fn radial_rule(
    region: RadialRegion,
    opts: &QuadratureOptions,
    origin_exponent: f64,
    endpoints: bool,
) -> Vec<(f64, f64)> {
    let (gx, gw) = gauss_legendre(opts.gauss_points);
    let mut out = Vec::new();
    let push_cell = |a: f64, b: f64, out: &mut Vec<(f64, f64)>| {
        let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
        for (x, w) in gx.iter().zip(&gw) {
            out.push((m + h * x, h * w));
        }
        if endpoints {
            // zero-weight samples so sup norms see the cell boundaries
            out.push((a, 0.0));
            out.push((b, 0.0));
        }
    };
    let mut b = region.outer;
    for _ in 0..opts.levels {
        let a = 0.5 * b;
        if a <= region.inner {
            break;
        }
        push_cell(a, b, &mut out);
        b = a;
    }
    if region.inner > 0.0 {
        push_cell(region.inner, b, &mut out);
    } else {
        // r = b v^q turns r^a dr into a smooth density in v when q = 1/(a+1)
        let q = if origin_exponent < 0.0 {
            (1.0 / (origin_exponent + 1.0)).min(200.0)
        } else {
            1.0
        };
        for (x, w) in gx.iter().zip(&gw) {
            let v = 0.5 * (x + 1.0);
            let r = b * v.powf(q);
            let jac = b * q * v.powf(q - 1.0) * 0.5 * w;
            out.push((r, jac));
        }
        if endpoints {
            out.push((b, 0.0));
        }
    }
    out
}

/// Near-origin power of |r^a d^alpha f|^p r^{d-1} for a derivative of order k.
fn integrand_exponent(f: &dyn Field, weight_exponent: f64, k: u32, p: f64) -> f64 {
    let s = f.singular_power().unwrap_or(f64::INFINITY);
    let smooth = (f.origin_order().min(1 << 20) as f64 - k as f64).max(0.0);
    let lead = weight_exponent + (s - k as f64).min(smooth);
    if p.is_infinite() {
        lead
    } else {
        p * lead + f.dim() as f64 - 1.0
    }
}

/// Per-alpha weighted norms ||r^{a_i} d^{alpha_i} f||_{L^p(region)}, where
/// a_i = `weight_exponents[i]`. Errors when a norm diverges at the origin.
pub fn weighted_norms(
    f: &dyn Field,
    alphas: &[MultiIndex],
    weight_exponents: &[f64],
    p: f64,
    region: RadialRegion,
    opts: &QuadratureOptions,
) -> Result<Vec<f64>> {
    region.validate()?;
    if !(p >= 1.0) {
        return invalid(format!("integrability p must be >= 1, got {p}"));
    }
    if alphas.len() != weight_exponents.len() {
        return invalid("one weight exponent per multi-index is required");
    }
    let dim = f.dim();
    let mut worst = f64::INFINITY;
    for (alpha, &a) in alphas.iter().zip(weight_exponents) {
        if alpha.dim() != dim {
            return invalid(format!(
                "multi-index {alpha:?} does not match dimension {dim}"
            ));
        }
        let e = integrand_exponent(f, a, alpha.order(), p);
        if region.inner == 0.0 {
            let diverges = if p.is_infinite() { e < 0.0 } else { e <= -1.0 };
            if diverges {
                return Err(Error::Divergent(format!(
                    "weighted norm of d^{:?} with weight r^{a} and p = {p} is infinite near the origin (exponent {e})",
                    alpha.0
                )));
            }
        }
        worst = worst.min(e);
    }
    let sphere = SphereRule::new(dim, opts.sphere_points)?;
    let nodes = if p.is_infinite() {
        radial_rule(region, opts, 0.0, true)
    } else {
        radial_rule(region, opts, worst, false)
    };

    // group alphas by order so radial profiles share angular tables
    let mut by_order: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, a) in alphas.iter().enumerate() {
        by_order.entry(a.order()).or_default().push(i);
    }
    let max_order = by_order.keys().last().copied().unwrap_or(0) as usize;
    struct Table {
        rc: RadialCartesian,
        angular: Vec<Vec<f64>>,
        slots: Vec<(usize, usize)>, // (position in rc.alphas, position in caller's list)
    }
    let radial = f.as_radial();
    let tables: Vec<Table> = if radial.is_some() {
        by_order
            .iter()
            .map(|(&k, idx)| {
                let rc = RadialCartesian::new(dim, k as usize);
                let angular = sphere.directions.iter().map(|w| rc.angular(w)).collect();
                let slots = idx
                    .iter()
                    .map(|&i| {
                        (
                            rc.alphas()
                                .iter()
                                .position(|a| *a == alphas[i])
                                .expect("same order"),
                            i,
                        )
                    })
                    .collect();
                Table { rc, angular, slots }
            })
            .collect()
    } else {
        Vec::new()
    };

    let n = alphas.len();
    let mut sums = vec![CompensatedSum::new(); n];
    let mut sups = vec![0.0f64; n];
    let mut vals = vec![0.0; n];
    let mut x = vec![0.0; dim];
    let mut buf = Vec::new();
    let mut rw = vec![0.0; n];
    let int_p = (p.is_finite() && p == p.round() && p.abs() < 64.0).then_some(p as i32);
    let pow_p = |v: f64| match int_p {
        Some(2) => v * v,
        Some(k) => v.powi(k),
        None => v.powf(p),
    };
    for &(r, wr) in &nodes {
        if r <= 0.0 {
            continue;
        }
        let g = radial.map(|g| g.derivatives(r, max_order));
        for (w, &a) in rw.iter_mut().zip(weight_exponents) {
            *w = r.powf(a);
        }
        let radial_measure = wr * r.powi(dim as i32 - 1);
        let mut shell = vec![0.0; n];
        for (q, (w, &wq)) in sphere.directions.iter().zip(&sphere.weights).enumerate() {
            if let Some(g) = &g {
                for t in &tables {
                    let k = t.rc.order();
                    buf.resize(t.rc.alphas().len(), 0.0);
                    t.rc.combine(r, &g[..=k], &t.angular[q], &mut buf);
                    for &(pos, i) in &t.slots {
                        vals[i] = buf[pos];
                    }
                }
            } else {
                for (xi, wi) in x.iter_mut().zip(w) {
                    *xi = r * wi;
                }
                f.partials(&x, alphas, &mut vals);
            }
            for i in 0..n {
                let v = (rw[i] * vals[i]).abs();
                if p.is_infinite() {
                    sups[i] = sups[i].max(v);
                } else {
                    shell[i] += wq * pow_p(v);
                }
            }
        }
        if p.is_finite() {
            for i in 0..n {
                sums[i].add(radial_measure * shell[i]);
            }
        }
    }
    let out: Vec<f64> = if p.is_infinite() {
        sups
    } else {
        sums.iter()
            .map(|s| s.value().max(0.0).powf(1.0 / p))
            .collect()
    };
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::Divergent(
            "weighted norm evaluated to a non-finite value".into(),
        ));
    }
    Ok(out)
}

/// Combines per-alpha norms into the l^p aggregate (max for p = infinity).
pub fn aggregate(norms: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        norms.iter().copied().fold(0.0, f64::max)
    } else {
        norms
            .iter()
            .map(|v| v.powf(p))
            .collect::<CompensatedSum>()
            .value()
            .powf(1.0 / p)
    }
}

/// |f|_{K^{k,p}_gamma(region)} = (sum_{|alpha|=k} ||r^{k-gamma} d^alpha f||_p^p)^{1/p}.
pub fn weighted_seminorm(
    f: &dyn Field,
    spec: &WeightSpec,
    region: RadialRegion,
    opts: &QuadratureOptions,
) -> Result<f64> {
    let alphas = MultiIndex::of_order(f.dim(), spec.order);
    let exps = vec![spec.order as f64 - spec.gamma; alphas.len()];
    let norms = weighted_norms(f, &alphas, &exps, spec.p, region, opts)?;
    Ok(aggregate(&norms, spec.p))
}

/// Seminorms m_j for consecutive orders on a ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeminormSequence {
    pub p: f64,
    pub gamma: f64,
    pub radius: f64,
    pub orders: Vec<u32>,
    pub values: Vec<f64>,
}

impl SeminormSequence {
    pub fn compute(
        f: &dyn Field,
        p: f64,
        gamma: f64,
        radius: f64,
        orders: impl IntoIterator<Item = u32>,
        opts: &QuadratureOptions,
    ) -> Result<Self> {
        let orders: Vec<u32> = orders.into_iter().collect();
        let values = orders
            .iter()
            .map(|&k| {
                weighted_seminorm(
                    f,
                    &WeightSpec { p, gamma, order: k },
                    RadialRegion::ball(radius),
                    opts,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            p,
            gamma,
            radius,
            orders,
            values,
        })
    }

    /// CSV with columns j, seminorm, p, gamma, R.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("j,seminorm,p,gamma,R\n");
        for (j, v) in self.orders.iter().zip(&self.values) {
            s.push_str(&format!(
                "{j},{},{},{},{}\n",
                crate::io::fmt_f64(*v),
                crate::io::fmt_f64(self.p),
                crate::io::fmt_f64(self.gamma),
                crate::io::fmt_f64(self.radius)
            ));
        }
        s
    }
}

/// Envelope m_j <= C A^{j+1} j!.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub c: f64,
    pub a: f64,
}

/// Per-order constants (m_j / j!)^{1/(j+1)}.
pub fn envelope_ratios(orders: &[u32], values: &[f64]) -> Vec<f64> {
    orders
        .iter()
        .zip(values)
        .map(|(&j, &m)| {
            if m == 0.0 {
                0.0
            } else {
                ((m.ln() - ln_factorial(j as u64)) / (j as f64 + 1.0)).exp()
            }
        })
        .collect()
}

/// Minimal A with C = 1; an all-zero sequence gives (0, 0).
pub fn fit_envelope(orders: &[u32], values: &[f64]) -> Result<Envelope> {
    if orders.len() != values.len() || values.is_empty() {
        return invalid("envelope fit needs matching, nonempty orders and values");
    }
    if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return invalid("envelope fit needs finite nonnegative values");
    }
    let a = envelope_ratios(orders, values)
        .into_iter()
        .fold(0.0, f64::max);
    Ok(if a == 0.0 {
        Envelope { c: 0.0, a: 0.0 }
    } else {
        Envelope { c: 1.0, a }
    })
}

/// Result of the factorial-growth test on orders k > gamma - d/p.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JClassReport {
    pub pass: bool,
    pub envelope: Envelope,
    pub per_order: Vec<f64>,
    /// largest per-order constant on the upper half of the orders divided by
    /// the largest on the lower half; values near or below 1 mean the
    /// envelope is not being driven up by the highest orders
    pub growth_ratio: f64,
    pub sequence: SeminormSequence,
}

/// Accepts when the upper-half per-order constants stay within this factor
/// of the lower-half ones.
pub const J_CLASS_GROWTH_LIMIT: f64 = 1.5;

/// Checks the J-class bound |f|_{K^{k,p}_gamma} <= C A^{k+1} k! on B_R for
/// the orders gamma - d/p < k <= max_order.
pub fn j_class_check(
    f: &dyn Field,
    p: f64,
    gamma: f64,
    radius: f64,
    max_order: u32,
    opts: &QuadratureOptions,
) -> Result<JClassReport> {
    let threshold = gamma - f.dim() as f64 / p;
    let first = if threshold < 0.0 {
        0
    } else {
        threshold.floor() as u32 + 1
    };
    if first + 2 > max_order {
        return invalid(format!(
            "need at least three orders above {threshold}, max_order = {max_order}"
        ));
    }
    let seq = SeminormSequence::compute(f, p, gamma, radius, first..=max_order, opts)?;
    j_class_assess(seq)
}

/// Fits the envelope of a computed sequence and applies the growth test.
pub fn j_class_assess(seq: SeminormSequence) -> Result<JClassReport> {
    let envelope = fit_envelope(&seq.orders, &seq.values)?;
    let per_order = envelope_ratios(&seq.orders, &seq.values);
    let half = per_order.len() / 2;
    let lower = per_order[..half].iter().copied().fold(0.0, f64::max);
    let upper = per_order[half..].iter().copied().fold(0.0, f64::max);
    let growth_ratio = if lower > 0.0 {
        upper / lower
    } else if upper > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    Ok(JClassReport {
        pass: growth_ratio <= J_CLASS_GROWTH_LIMIT,
        envelope,
        per_order,
        growth_ratio,
        sequence: seq,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_matches_distance_and_plateau() {
        let set = SingularSet::new(vec![vec![0.0, 0.0, 0.0], vec![2.0, 0.0, 0.0]], 0.25).unwrap();
        assert!((weight_eval(&[0.1, 0.0, 0.0], &set) - 0.1).abs() < 1e-15);
        assert_eq!(weight_eval(&[1.0, 0.0, 0.0], &set), 1.0);
        assert!((weight_eval(&[0.0, 0.25, 0.0], &set) - 0.25).abs() < 1e-15);
        assert!((weight_eval(&[0.0, 0.5, 0.0], &set) - 1.0).abs() < 1e-15);
        assert!(SingularSet::new(vec![vec![0.0], vec![0.5]], 0.25).is_err());
    }

    #[test]
    fn fit_envelope_examples() {
        let orders: Vec<u32> = (0..6).collect();
        let fact = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0];
        let e = fit_envelope(&orders, &fact).unwrap();
        assert!((e.a - 1.0).abs() < 1e-12 && e.c == 1.0);
        let zero = fit_envelope(&orders, &[0.0; 6]).unwrap();
        assert_eq!(zero, Envelope { c: 0.0, a: 0.0 });
    }
}
