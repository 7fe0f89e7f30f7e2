//! Continuous piecewise polynomials on a radial grid, with Galerkin matrices
//! for the measure |S^{d-1}| r^{d-1} dr (so that integrals are over R^d).

use super::banded::SymBand;
use super::grid::GradedRadialGrid;
use crate::error::{invalid, Result};
use crate::quadrature::{gauss_legendre, gauss_lobatto, LagrangeBasis};
use crate::sphere::sphere_area;

/// Lobatto nodal basis of fixed degree on every cell of a radial grid.
#[derive(Debug, Clone)]
pub struct FemSpace {
    pub dim: usize,
    pub degree: usize,
    pub grid: GradedRadialGrid,
    bounds: Vec<f64>,
    basis: LagrangeBasis,
    qx: Vec<f64>,
    qw: Vec<f64>,
    /// basis values at the reference quadrature points, [q * (p+1) + i]
    bq: Vec<f64>,
    /// reference derivatives (d/dxi) at the quadrature points
    dq: Vec<f64>,
    area: f64,
}

impl FemSpace {
    pub fn new(grid: GradedRadialGrid, degree: usize, dim: usize) -> Result<Self> {
        if degree == 0 {
            return invalid("element degree must be at least 1");
        }
        if dim == 0 {
            return invalid("dimension must be positive");
        }
        let (nodes, _) = gauss_lobatto(degree + 1);
        let basis = LagrangeBasis::new(nodes);
        let (qx, qw) = gauss_legendre(2 * degree + 2);
        let np = degree + 1;
        let mut bq = vec![0.0; qx.len() * np];
        let mut dq = vec![0.0; qx.len() * np];
        for (q, &x) in qx.iter().enumerate() {
            basis.values_and_derivatives(
                x,
                &mut bq[q * np..(q + 1) * np],
                &mut dq[q * np..(q + 1) * np],
            );
        }
        let bounds = grid.boundaries();
        Ok(Self {
            dim,
            degree,
            grid,
            bounds,
            basis,
            qx,
            qw,
            bq,
            dq,
            area: sphere_area(dim),
        })
    }

    pub fn elements(&self) -> usize {
        self.bounds.len() - 1
    }

    pub fn n_dofs(&self) -> usize {
        self.elements() * self.degree + 1
    }

    pub fn outer_radius(&self) -> f64 {
        *self.bounds.last().expect("nonempty grid")
    }

    pub fn sphere_area(&self) -> f64 {
        self.area
    }

    /// Radius of every degree of freedom (node 0 is the origin).
    pub fn node_coords(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_dofs());
        for e in 0..self.elements() {
            let (a, b) = (self.bounds[e], self.bounds[e + 1]);
            let start = if e == 0 { 0 } else { 1 };
            for &xi in &self.basis.nodes()[start..] {
                out.push(if xi == -1.0 {
                    a
                } else if xi == 1.0 {
                    b
                } else {
                    0.5 * (a + b) + 0.5 * (b - a) * xi
                });
            }
        }
        debug_assert_eq!(out.len(), self.n_dofs());
        out
    }

    pub fn quad_per_element(&self) -> usize {
        self.qx.len()
    }

    /// Quadrature points (r, weight) over all elements; the weight includes
    /// |S^{d-1}| r^{d-1} and the element Jacobian.
    pub fn quad_points(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.elements() * self.qx.len());
        for e in 0..self.elements() {
            let (a, b) = (self.bounds[e], self.bounds[e + 1]);
            let h = 0.5 * (b - a);
            for (x, w) in self.qx.iter().zip(&self.qw) {
                let r = 0.5 * (a + b) + h * x;
                out.push((r, w * h * self.area * r.powi(self.dim as i32 - 1)));
            }
        }
        out
    }

    /// Values of a discrete function at the quadrature points.
    pub fn eval_at_quad(&self, values: &[f64]) -> Vec<f64> {
        self.apply_at_quad(values, &self.bq, |_| 1.0)
    }

    /// Radial derivatives of a discrete function at the quadrature points.
    pub fn deriv_at_quad(&self, values: &[f64]) -> Vec<f64> {
        self.apply_at_quad(values, &self.dq, |h| 1.0 / h)
    }

    fn apply_at_quad(&self, values: &[f64], table: &[f64], scale: impl Fn(f64) -> f64) -> Vec<f64> {
        let (p, np, nq) = (self.degree, self.degree + 1, self.qx.len());
        let mut out = Vec::with_capacity(self.elements() * nq);
        for e in 0..self.elements() {
            let s = scale(0.5 * (self.bounds[e + 1] - self.bounds[e]));
            let loc = &values[e * p..e * p + np];
            for q in 0..nq {
                let row = &table[q * np..(q + 1) * np];
                out.push(s * row.iter().zip(loc).map(|(a, b)| a * b).sum::<f64>());
            }
        }
        out
    }

    /// sum_q w_q f_q over the whole domain.
    pub fn integrate(&self, f_at_quad: &[f64]) -> f64 {
        self.quad_points()
            .iter()
            .zip(f_at_quad)
            .map(|((_, w), f)| w * f)
            .sum()
    }

    fn assemble(&self, coef: &[f64], use_derivs: bool) -> SymBand {
        let (p, np, nq) = (self.degree, self.degree + 1, self.qx.len());
        let mut m = SymBand::zeros(self.n_dofs(), p);
        let table = if use_derivs { &self.dq } else { &self.bq };
        for e in 0..self.elements() {
            let (a, b) = (self.bounds[e], self.bounds[e + 1]);
            let h = 0.5 * (b - a);
            let s = if use_derivs { 1.0 / (h * h) } else { 1.0 };
            for q in 0..nq {
                let r = 0.5 * (a + b) + h * self.qx[q];
                let w =
                    self.qw[q] * h * self.area * r.powi(self.dim as i32 - 1) * coef[e * nq + q] * s;
                if w == 0.0 {
                    continue;
                }
                let row = &table[q * np..(q + 1) * np];
                for i in 0..np {
                    for j in 0..=i {
                        m.add(e * p + i, e * p + j, w * row[i] * row[j]);
                    }
                }
            }
        }
        m
    }

    /// Mass matrix weighted by a function given at the quadrature points.
    pub fn weighted_mass(&self, coef: &[f64]) -> SymBand {
        self.assemble(coef, false)
    }

    pub fn mass(&self) -> SymBand {
        self.assemble(&vec![1.0; self.elements() * self.qx.len()], false)
    }

    /// int u' v' over R^d (radial functions).
    pub fn stiffness(&self) -> SymBand {
        self.assemble(&vec![1.0; self.elements() * self.qx.len()], true)
    }

    /// Load vector int f v for f given at the quadrature points.
    pub fn load(&self, f: &[f64]) -> Vec<f64> {
        let (p, np, nq) = (self.degree, self.degree + 1, self.qx.len());
        let mut out = vec![0.0; self.n_dofs()];
        for e in 0..self.elements() {
            let (a, b) = (self.bounds[e], self.bounds[e + 1]);
            let h = 0.5 * (b - a);
            for q in 0..nq {
                let r = 0.5 * (a + b) + h * self.qx[q];
                let w = self.qw[q] * h * self.area * r.powi(self.dim as i32 - 1) * f[e * nq + q];
                for i in 0..np {
                    out[e * p + i] += w * self.bq[q * np + i];
                }
            }
        }
        out
    }

    /// Nodal interpolant of a function.
    pub fn interpolate(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.node_coords().into_iter().map(f).collect()
    }

    /// Element index and reference coordinate of r (clamped to the domain).
    pub fn locate(&self, r: f64) -> (usize, f64) {
        let r = r.clamp(0.0, self.outer_radius());
        let e = self
            .bounds
            .partition_point(|b| *b <= r)
            .saturating_sub(1)
            .min(self.elements() - 1);
        let (a, b) = (self.bounds[e], self.bounds[e + 1]);
        (e, (2.0 * r - a - b) / (b - a))
    }

    /// Value and radial derivative of a discrete function at r.
    pub fn eval(&self, values: &[f64], r: f64) -> (f64, f64) {
        let (e, xi) = self.locate(r);
        let (p, np) = (self.degree, self.degree + 1);
        let mut v = vec![0.0; np];
        let mut d = vec![0.0; np];
        self.basis.values_and_derivatives(xi, &mut v, &mut d);
        let loc = &values[e * p..e * p + np];
        let h = 0.5 * (self.bounds[e + 1] - self.bounds[e]);
        (
            loc.iter().zip(&v).map(|(a, b)| a * b).sum(),
            loc.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>() / h,
        )
    }

    /// Degree-p polynomial on the cell containing r: node radii and values.
    pub fn local_polynomial(&self, values: &[f64], r: f64) -> (Vec<f64>, Vec<f64>) {
        let (e, _) = self.locate(r);
        let (p, np) = (self.degree, self.degree + 1);
        let (a, b) = (self.bounds[e], self.bounds[e + 1]);
        let xs = self
            .basis
            .nodes()
            .iter()
            .map(|xi| 0.5 * (a + b) + 0.5 * (b - a) * xi)
            .collect();
        (xs, values[e * p..e * p + np].to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(dim: usize) -> FemSpace {
        let g = GradedRadialGrid::build(2.0, 6, 0.5)
            .unwrap()
            .with_max_width(0.5)
            .unwrap();
        FemSpace::new(g, 4, dim).unwrap()
    }

    #[test]
    fn mass_integrates_over_the_ball() {
        // volume of B_2 in 3D via 1^T M 1
        let s = space(3);
        let ones = vec![1.0; s.n_dofs()];
        let vol = s.mass().bilinear(&ones, &ones);
        assert!((vol - 4.0 / 3.0 * std::f64::consts::PI * 8.0).abs() < 1e-12);
    }

    #[test]
    fn stiffness_of_quadratic() {
        // int_{B_2} |grad r^2|^2 = 4 pi int 4 r^2 r^2 dr = 16 pi 32 / 5
        let s = space(3);
        let u = s.interpolate(|r| r * r);
        let e = s.stiffness().bilinear(&u, &u);
        assert!((e - 16.0 * std::f64::consts::PI * 32.0 / 5.0).abs() < 1e-9);
        let (v, d) = s.eval(&u, 0.77);
        assert!((v - 0.77 * 0.77).abs() < 1e-13 && (d - 1.54).abs() < 1e-12);
        assert_eq!(s.node_coords()[0], 0.0);
        assert_eq!(*s.node_coords().last().unwrap(), 2.0);
    }
}
