//! Radial Poisson problem -Laplace u = 4 pi rho with a far-field condition.

use super::banded::{BandCholesky, SymBand};
use super::fem::FemSpace;
use super::field::RadialField;
use crate::error::{invalid, Error, Result};
use std::sync::Arc;

/// Relative size of rho at the outer radius above which it is treated as not decaying.
pub const DECAY_TOLERANCE: f64 = 1e-8;

/// Factorized radial Poisson operator on a fixed space.
///
/// For d >= 3 the outer boundary carries the Robin condition
/// u' = -(d-2) u / R of a point charge; for d = 2 the outer value is fixed to
/// the logarithmic far field -2 Q log R with Q the total charge.
#[derive(Debug, Clone)]
pub struct PoissonSolver {
    space: Arc<FemSpace>,
    matrix: SymBand,
    factor: BandCholesky,
    mass: SymBand,
    mass_factor: BandCholesky,
    free: usize,
}

impl PoissonSolver {
    pub fn new(space: Arc<FemSpace>) -> Result<Self> {
        let d = space.dim;
        if d < 2 {
            return invalid("the radial Poisson solver needs d >= 2");
        }
        let mut k = space.stiffness();
        let n = space.n_dofs();
        let free = if d >= 3 {
            let r = space.outer_radius();
            k.add(
                n - 1,
                n - 1,
                space.sphere_area() * (d as f64 - 2.0) * r.powi(d as i32 - 2),
            );
            n
        } else {
            n - 1
        };
        let factor = k.truncate(free).cholesky()?;
        let mass = space.mass().truncate(free);
        let mass_factor = mass.cholesky()?;
        Ok(Self {
            space,
            matrix: k,
            factor,
            mass,
            mass_factor,
            free,
        })
    }

    pub fn space(&self) -> &Arc<FemSpace> {
        &self.space
    }

    fn check_decay(&self, rho_q: &[f64]) -> Result<()> {
        let max = rho_q.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let last = rho_q.last().copied().unwrap_or(0.0).abs();
        if max > 0.0 && last > DECAY_TOLERANCE * max {
            return Err(Error::InvalidInput(format!(
                "source does not decay: |rho(R)| / max|rho| = {:.3e}; enlarge the outer radius",
                last / max
            )));
        }
        Ok(())
    }

    /// Solves for a source given at the quadrature points of the space.
    pub fn solve(&self, rho_q: &[f64]) -> Result<RadialField> {
        if rho_q.len() != self.space.elements() * self.space.quad_per_element() {
            return invalid("source must be given at every quadrature point");
        }
        self.check_decay(rho_q)?;
        let mut f: Vec<f64> = self
            .space
            .load(rho_q)
            .iter()
            .map(|v| 4.0 * std::f64::consts::PI * v)
            .collect();
        let n = self.space.n_dofs();
        let mut boundary = 0.0;
        if self.free < n {
            // logarithmic far field for d = 2
            let q = self.space.integrate(rho_q);
            boundary = -2.0 * q * self.space.outer_radius().ln();
            let col = {
                let mut e = vec![0.0; n];
                e[n - 1] = boundary;
                self.matrix.matvec(&e)
            };
            for i in 0..self.free {
                f[i] -= col[i];
            }
        }
        let mut u = self.factor.solve(&f[..self.free]);
        if self.free < n {
            u.push(boundary);
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::Singular(
                "Poisson solve produced non-finite values".into(),
            ));
        }
        RadialField::new(self.space.clone(), u)
    }

    /// L^2 norm of the Galerkin residual of (u, rho) (dual norm through the
    /// mass matrix).
    pub fn residual(&self, u: &RadialField, rho_q: &[f64]) -> f64 {
        let f = self.space.load(rho_q);
        let ku = self.matrix.matvec(&u.values);
        let r: Vec<f64> = (0..self.free)
            .map(|i| ku[i] - 4.0 * std::f64::consts::PI * f[i])
            .collect();
        let z = self.mass_factor.solve(&r);
        r.iter()
            .zip(&z)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            .max(0.0)
            .sqrt()
    }

    pub fn mass(&self) -> &SymBand {
        &self.mass
    }
}

/// One-shot solve for a source given as a function of r.
pub fn poisson_solve(space: Arc<FemSpace>, rho: impl Fn(f64) -> f64) -> Result<RadialField> {
    let rho_q: Vec<f64> = space.quad_points().iter().map(|(r, _)| rho(*r)).collect();
    PoissonSolver::new(space)?.solve(&rho_q)
}
