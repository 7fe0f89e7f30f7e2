//! Best approximation of radial profiles by discontinuous piecewise
//! polynomials in L^2(r^{d-1} dr): geometric meshes with linearly growing
//! degree against uniform meshes with fixed degree.

use crate::error::{invalid, Error, Result};
use crate::functions::RadialFunction;
use crate::io::fmt_f64;
use crate::quadrature::gauss_legendre;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// One cell [a, b] carrying polynomials of the given degree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HpCell {
    pub a: f64,
    pub b: f64,
    pub degree: usize,
}

/// P_0..=P_n at x.
fn legendre_all(n: usize, x: f64, out: &mut [f64]) {
    out[0] = 1.0;
    if n >= 1 {
        out[1] = x;
    }
    for k in 2..=n {
        let kf = k as f64;
        out[k] = ((2.0 * kf - 1.0) * x * out[k - 1] - (kf - 1.0) * out[k - 2]) / kf;
    }
}

/// Quadrature (r, weight * r^{d-1}) on a cell. A cell touching the origin
/// uses r = b v^2 so that half-integer powers of r become polynomials.
fn cell_rule(cell: &HpCell, dim: usize, n: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let jac = |r: f64| r.powi(dim as i32 - 1);
    if cell.a == 0.0 {
        x.iter()
            .zip(&w)
            .map(|(&t, &wt)| {
                let v = 0.5 * (t + 1.0);
                let r = cell.b * v * v;
                (r, 0.5 * wt * 2.0 * cell.b * v * jac(r))
            })
            .collect()
    } else {
        let h = cell.b - cell.a;
        x.iter()
            .zip(&w)
            .map(|(&t, &wt)| {
                let r = cell.a + 0.5 * h * (t + 1.0);
                (r, 0.5 * h * wt * jac(r))
            })
            .collect()
    }
}

/// Squared weighted L^2 error of the best approximation on one cell.
fn cell_error_sq(g: &dyn RadialFunction, dim: usize, cell: &HpCell) -> Result<f64> {
    let p = cell.degree;
    let rule = cell_rule(cell, dim, 2 * p + 40);
    let mut gram = DMatrix::<f64>::zeros(p + 1, p + 1);
    let mut rhs = DVector::<f64>::zeros(p + 1);
    let mut basis = vec![0.0; p + 1];
    let mut values = Vec::with_capacity(rule.len());
    let to_ref = |r: f64| 2.0 * (r - cell.a) / (cell.b - cell.a) - 1.0;
    for &(r, w) in &rule {
        let gv = g.value(r);
        values.push(gv);
        legendre_all(p, to_ref(r), &mut basis);
        for i in 0..=p {
            rhs[i] += w * gv * basis[i];
            for j in 0..=i {
                gram[(i, j)] += w * basis[i] * basis[j];
            }
        }
    }
    for i in 0..=p {
        for j in 0..i {
            gram[(j, i)] = gram[(i, j)];
        }
    }
    let coef = gram
        .cholesky()
        .ok_or_else(|| Error::Singular("cell Gram matrix not positive definite".into()))?
        .solve(&rhs);
    let mut err = 0.0;
    for (&(r, w), gv) in rule.iter().zip(&values) {
        legendre_all(p, to_ref(r), &mut basis);
        let pv: f64 = (0..=p).map(|i| coef[i] * basis[i]).sum();
        err += w * (gv - pv).powi(2);
    }
    Ok(err)
}

/// Best-approximation error and degrees of freedom on a mesh.
pub fn projection_error(
    g: &dyn RadialFunction,
    dim: usize,
    cells: &[HpCell],
) -> Result<(usize, f64)> {
    if cells.is_empty() {
        return invalid("mesh has no cells");
    }
    let mut total = 0.0;
    let mut dof = 0;
    for c in cells {
        if !(c.a >= 0.0 && c.b > c.a) {
            return invalid(format!("bad cell [{}, {}]", c.a, c.b));
        }
        total += cell_error_sq(g, dim, c)?;
        dof += c.degree + 1;
    }
    Ok((dof, total.sqrt()))
}

/// Geometric mesh on [0, R] with `layers` refinements toward the origin:
/// cells [0, R s^L], [R s^L, R s^{L-1}], ..., [R s, R]; cell i (counted
/// from the origin) gets degree start + round(slope i).
pub fn geometric_mesh(
    radius: f64,
    sigma: f64,
    layers: usize,
    start: usize,
    slope: f64,
) -> Vec<HpCell> {
    let mut edges: Vec<f64> = (0..=layers)
        .rev()
        .map(|l| radius * sigma.powi(l as i32))
        .collect();
    edges.insert(0, 0.0);
    edges
        .windows(2)
        .enumerate()
        .map(|(i, w)| HpCell {
            a: w[0],
            b: w[1],
            degree: start + (slope * i as f64).round() as usize,
        })
        .collect()
}

/// n equal cells of one degree on [0, R].
pub fn uniform_mesh(radius: f64, cells: usize, degree: usize) -> Vec<HpCell> {
    (0..cells)
        .map(|i| HpCell {
            a: radius * i as f64 / cells as f64,
            b: radius * (i + 1) as f64 / cells as f64,
            degree,
        })
        .collect()
}

/// Least-squares line y = slope x + intercept and Pearson correlation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub correlation: f64,
}

pub fn line_fit(x: &[f64], y: &[f64]) -> LineFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    LineFit {
        slope,
        intercept: my - slope * mx,
        correlation: sxy / (sxx * syy).sqrt(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HpRow {
    pub dof: usize,
    pub error: f64,
}

/// (DOF, error) rows with the fits of ln(error) against sqrt(DOF) and ln(DOF).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HpTable {
    pub rows: Vec<HpRow>,
    pub sqrt_fit: LineFit,
    pub log_fit: LineFit,
}

impl HpTable {
    fn from_rows(rows: Vec<HpRow>) -> Self {
        let ln_e: Vec<f64> = rows.iter().map(|r| r.error.ln()).collect();
        let sq: Vec<f64> = rows.iter().map(|r| (r.dof as f64).sqrt()).collect();
        let ln_d: Vec<f64> = rows.iter().map(|r| (r.dof as f64).ln()).collect();
        Self {
            sqrt_fit: line_fit(&sq, &ln_e),
            log_fit: line_fit(&ln_d, &ln_e),
            rows,
        }
    }

    /// ln(error) decreases linearly in sqrt(DOF).
    pub fn is_exponential(&self, min_corr: f64) -> bool {
        self.sqrt_fit.slope < 0.0 && self.sqrt_fit.correlation.abs() >= min_corr
    }

    /// ln(error) is linear in ln(DOF), and fits better that way than in sqrt(DOF).
    pub fn is_algebraic(&self, min_corr: f64) -> bool {
        self.log_fit.slope < 0.0
            && self.log_fit.correlation.abs() >= min_corr
            && self.log_fit.correlation.abs() > self.sqrt_fit.correlation.abs()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("dof,error\n");
        for r in &self.rows {
            s.push_str(&format!("{},{}\n", r.dof, fmt_f64(r.error)));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HpParams {
    pub dim: usize,
    pub radius: f64,
    pub sigma: f64,
    /// numbers of geometric layers, one mesh each
    pub layers: Vec<usize>,
    pub degree_start: usize,
    pub degree_slope: f64,
    /// uniform control: cell counts and the fixed degree
    pub uniform_cells: Vec<usize>,
    pub uniform_degree: usize,
}

impl Default for HpParams {
    fn default() -> Self {
        Self {
            dim: 3,
            radius: 1.0,
            sigma: 0.17,
            layers: (2..=12).collect(),
            degree_start: 1,
            degree_slope: 1.0,
            uniform_cells: vec![2, 4, 8, 16, 32, 64, 128, 256],
            uniform_degree: 2,
        }
    }
}

impl HpParams {
    fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return invalid(format!("sigma must lie in (0, 1), got {}", self.sigma));
        }
        if !(self.radius > 0.0) {
            return invalid("radius must be positive");
        }
        if self.layers.len() < 3 || self.uniform_cells.len() < 3 {
            return invalid("need at least three meshes per sequence for a fit");
        }
        if self.layers.contains(&0) || self.uniform_cells.contains(&0) {
            return invalid("layer and cell counts must be positive");
        }
        if !(self.degree_slope > 0.0) || self.degree_start == 0 {
            return invalid("degree schedule must start at 1 or more and increase");
        }
        if self
            .layers
            .iter()
            .max()
            .map(|&l| self.degree_start + (self.degree_slope * l as f64).round() as usize)
            > Some(40)
        {
            return invalid("degree schedule exceeds 40");
        }
        Ok(())
    }
}

/// Geometric hp sequence of `params.layers`.
pub fn hp_convergence_demo(g: &dyn RadialFunction, params: &HpParams) -> Result<HpTable> {
    params.validate()?;
    let rows = params
        .layers
        .iter()
        .map(|&l| {
            let mesh = geometric_mesh(
                params.radius,
                params.sigma,
                l,
                params.degree_start,
                params.degree_slope,
            );
            projection_error(g, params.dim, &mesh).map(|(dof, error)| HpRow { dof, error })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HpTable::from_rows(rows))
}

/// Uniform meshes of fixed degree.
pub fn uniform_control(g: &dyn RadialFunction, params: &HpParams) -> Result<HpTable> {
    params.validate()?;
    let rows = params
        .uniform_cells
        .iter()
        .map(|&n| {
            let mesh = uniform_mesh(params.radius, n, params.uniform_degree);
            projection_error(g, params.dim, &mesh).map(|(dof, error)| HpRow { dof, error })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HpTable::from_rows(rows))
}

/// Correlation threshold of the rate fits.
pub const HP_MIN_CORRELATION: f64 = 0.98;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HpComparison {
    pub geometric: HpTable,
    pub uniform: HpTable,
    pub exponential: bool,
    pub algebraic_control: bool,
}

impl HpComparison {
    pub fn pass(&self) -> bool {
        self.exponential && self.algebraic_control
    }
}

pub fn hp_comparison(g: &dyn RadialFunction, params: &HpParams) -> Result<HpComparison> {
    let geometric = hp_convergence_demo(g, params)?;
    let uniform = uniform_control(g, params)?;
    Ok(HpComparison {
        exponential: geometric.is_exponential(HP_MIN_CORRELATION),
        algebraic_control: uniform.is_algebraic(HP_MIN_CORRELATION),
        geometric,
        uniform,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::PowerExp;

    #[test]
    fn polynomials_are_reproduced() {
        // r^2 lies in every space of degree >= 2
        let g = PowerExp::new(1.0, 2.0, 0.0);
        let (_, e) = projection_error(&g, 3, &uniform_mesh(1.0, 3, 2)).unwrap();
        assert!(e < 1e-14, "{e}");
    }

    #[test]
    fn geometric_mesh_layout() {
        let m = geometric_mesh(1.0, 0.5, 2, 1, 1.0);
        assert_eq!(m.len(), 3);
        assert_eq!((m[0].a, m[0].b, m[0].degree), (0.0, 0.25, 1));
        assert_eq!((m[2].a, m[2].b, m[2].degree), (0.5, 1.0, 3));
    }

    #[test]
    fn line_fit_exact() {
        let f = line_fit(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]);
        assert!((f.slope - 2.0).abs() < 1e-15 && (f.correlation - 1.0).abs() < 1e-15);
    }
}
