//! Lowest eigenpairs of -t Laplace + W on radial functions.

use super::banded::{BandCholesky, SymBand};
use super::fem::FemSpace;
use super::field::RadialField;
use crate::error::{invalid, Error, Result};
use crate::potentials::CentralPotential;
use nalgebra::DMatrix;
use std::sync::Arc;

/// Galerkin form of -t Laplace + W with a homogeneous Dirichlet condition at
/// the outer radius (no condition is needed at the origin).
#[derive(Debug, Clone)]
pub struct RadialHamiltonian {
    pub space: Arc<FemSpace>,
    pub kinetic: f64,
    /// W at the quadrature points
    pub potential_q: Vec<f64>,
    /// guaranteed lower bound of the spectrum
    pub lower_bound: f64,
}

impl RadialHamiltonian {
    /// W = central potential + `extra` (given at the quadrature points).
    pub fn new(
        space: Arc<FemSpace>,
        kinetic: f64,
        central: &CentralPotential,
        extra: Option<&[f64]>,
    ) -> Result<Self> {
        if !(kinetic > 0.0) {
            return invalid(format!("kinetic prefactor must be positive, got {kinetic}"));
        }
        let d = space.dim;
        if central.charge > 0.0 && d < 2 {
            return invalid("an attractive Coulomb term needs d >= 2");
        }
        let pts = space.quad_points();
        let nq = pts.len();
        if let Some(e) = extra {
            if e.len() != nq {
                return invalid("extra potential must be given at every quadrature point");
            }
        }
        let potential_q: Vec<f64> = pts
            .iter()
            .enumerate()
            .map(|(i, (r, _))| central.value(*r) + extra.map_or(0.0, |e| e[i]))
            .collect();
        // hydrogenic ground state of -t Laplace - Z/r in R^d is -Z^2 / (t (d-1)^2)
        let coulomb_floor = if central.charge > 0.0 {
            -central.charge * central.charge / (kinetic * (d as f64 - 1.0).powi(2))
        } else {
            0.0
        };
        let smooth_min = pts
            .iter()
            .enumerate()
            .map(|(i, (r, _))| central.value_smooth(*r) + extra.map_or(0.0, |e| e[i]))
            .fold(f64::INFINITY, f64::min)
            .min(central.smooth_lower_bound(space.outer_radius()));
        Ok(Self {
            space,
            kinetic,
            potential_q,
            lower_bound: coulomb_floor + smooth_min,
        })
    }

    /// Full (unconstrained) stiffness-plus-potential matrix.
    pub fn matrix(&self) -> SymBand {
        let k = self.space.stiffness();
        let w = self.space.weighted_mass(&self.potential_q);
        w.axpy(self.kinetic, &k)
    }
}

/// Symmetric low-rank term sum_{ij} C_ij u_i u_j^T added to the operator.
#[derive(Debug, Clone)]
pub struct LowRank {
    pub vectors: Vec<Vec<f64>>,
    pub coefs: DMatrix<f64>,
}

impl LowRank {
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let ux: Vec<f64> = self.vectors.iter().map(|u| dot(u, x)).collect();
        for (i, ui) in self.vectors.iter().enumerate() {
            let s: f64 = (0..ux.len()).map(|j| self.coefs[(i, j)] * ux[j]).sum();
            for (o, u) in out.iter_mut().zip(ui) {
                *o += s * u;
            }
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solver settings.
#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    pub max_iterations: usize,
    /// stop when every residual is below tol * (1 + |lambda|)
    pub tolerance: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            tolerance: 1e-12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub lambda: f64,
    pub field: RadialField,
    pub residual: f64,
}

/// Operator A + low-rank, restricted to the free degrees of freedom.
struct ReducedOperator {
    a: SymBand,
    low_rank: Option<LowRank>,
}

impl ReducedOperator {
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.a.matvec(x);
        if let Some(l) = &self.low_rank {
            l.apply(x, &mut y);
        }
        y
    }
}

/// Solves (B + U C U^T) z = f given a factor of B (Woodbury identity).
struct ShiftedSolver {
    b: BandCholesky,
    low_rank: Option<(Vec<Vec<f64>>, DMatrix<f64>, Vec<Vec<f64>>)>,
}

impl ShiftedSolver {
    fn new(b: BandCholesky, low_rank: Option<&LowRank>) -> Result<Self> {
        let low_rank = match low_rank {
            None => None,
            Some(l) => {
                let binv_u: Vec<Vec<f64>> = l.vectors.iter().map(|u| b.solve(u)).collect();
                let k = l.vectors.len();
                let cinv = l.coefs.clone().try_inverse().ok_or_else(|| {
                    Error::Singular("low-rank coefficient matrix is singular".into())
                })?;
                let mut cap = cinv;
                for i in 0..k {
                    for j in 0..k {
                        cap[(i, j)] += dot(&l.vectors[i], &binv_u[j]);
                    }
                }
                let cap_inv = cap.try_inverse().ok_or_else(|| {
                    Error::Singular("Woodbury capacitance matrix is singular".into())
                })?;
                Some((l.vectors.clone(), cap_inv, binv_u))
            }
        };
        Ok(Self { b, low_rank })
    }

    fn solve(&self, f: &[f64]) -> Vec<f64> {
        let mut z = self.b.solve(f);
        if let Some((u, cap_inv, binv_u)) = &self.low_rank {
            let utz: Vec<f64> = u.iter().map(|ui| dot(ui, &z)).collect();
            for i in 0..u.len() {
                let s: f64 = (0..u.len()).map(|j| cap_inv[(i, j)] * utz[j]).sum();
                for (zk, bk) in z.iter_mut().zip(&binv_u[i]) {
                    *zk -= s * bk;
                }
            }
        }
        z
    }
}

/// The `n_states` lowest eigenpairs by block inverse iteration with a shift
/// below the spectrum, M-orthonormalization and Rayleigh-Ritz.
///
/// `low_rank` adds a symmetric low-rank term acting on the free degrees of
/// freedom; `guess` seeds the block (e.g. the previous SCF orbitals).
pub fn radial_eigensolve_with(
    h: &RadialHamiltonian,
    n_states: usize,
    low_rank: Option<&LowRank>,
    guess: Option<&[RadialField]>,
    opts: &EigenOptions,
) -> Result<Vec<EigenPair>> {
    let space = &h.space;
    let n = space.n_dofs() - 1;
    if n_states == 0 || n_states > n / 2 {
        return invalid(format!(
            "cannot compute {n_states} states with {n} unknowns"
        ));
    }
    let a = ReducedOperator {
        a: h.matrix().truncate(n),
        low_rank: low_rank.cloned(),
    };
    let m = space.mass().truncate(n);
    let m_fac = m.cholesky()?;
    let dual_norm = |r: &[f64]| dot(r, &m_fac.solve(r)).max(0.0).sqrt();

    // a low-rank term can lower the spectrum by at most its M^{-1} norm
    let mut perturb = 0.0;
    if let Some(l) = low_rank {
        let norms: Vec<f64> = l.vectors.iter().map(|u| dual_norm(u)).collect();
        for i in 0..norms.len() {
            for j in 0..norms.len() {
                perturb += l.coefs[(i, j)].abs() * norms[i] * norms[j];
            }
        }
    }
    let nodes = space.node_coords();
    let mut x: Vec<Vec<f64>> = match guess {
        Some(g) if g.len() >= n_states => g[..n_states]
            .iter()
            .map(|f| f.values[..n].to_vec())
            .collect(),
        _ => (0..n_states)
            .map(|i| {
                nodes[..n]
                    .iter()
                    .map(|r| r.powi(i as i32) * (-r).exp())
                    .collect()
            })
            .collect(),
    };

    // A - s M is positive definite exactly when s lies below the spectrum of
    // A, which the banded Cholesky detects. Bisect between the analytic lower
    // bound and a Rayleigh quotient for the largest such s, then step below it
    // by the low-rank bound and a margin.
    let spd = |s: f64| a.a.axpy(-s, &m).cholesky().is_ok();
    let mut lo = h.lower_bound;
    let mut widen = 0.05 * (1.0 + lo.abs());
    while !spd(lo) {
        lo -= widen;
        widen *= 4.0;
        if widen > 1e8 * (1.0 + h.lower_bound.abs()) {
            return Err(Error::Unstable(
                "could not find a shift below the spectrum; the potential may be unbounded below"
                    .into(),
            ));
        }
    }
    let mut hi = x
        .iter()
        .map(|v| dot(v, &a.a.matvec(v)) / m.bilinear(v, v))
        .fold(f64::INFINITY, f64::min);
    if !(hi > lo) {
        hi = lo;
    }
    for _ in 0..40 {
        if hi - lo <= 1e-3 * (1.0 + lo.abs()) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if spd(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut shift = lo - perturb - 1e-2 * (1.0 + lo.abs());
    let factor = loop {
        match a.a.axpy(-shift, &m).cholesky() {
            Ok(f) => break f,
            Err(_) => shift -= 0.1 * (1.0 + shift.abs()),
        }
    };
    let solver = ShiftedSolver::new(factor, low_rank)?;

    m_orthonormalize(&mut x, &m)?;
    let mut lambdas = vec![0.0; n_states];
    let mut residuals = vec![f64::INFINITY; n_states];
    // the best iterate is kept: once the residual reaches its roundoff floor
    // further iterations only fluctuate
    let mut best = f64::INFINITY;
    let mut best_state = (x.clone(), lambdas.clone(), residuals.clone());
    let mut since_best = 0;
    for _ in 0..opts.max_iterations {
        let mut y: Vec<Vec<f64>> = x.iter().map(|xi| solver.solve(&m.matvec(xi))).collect();
        m_orthonormalize(&mut y, &m)?;
        let ay: Vec<Vec<f64>> = y.iter().map(|yi| a.apply(yi)).collect();
        let hmat = DMatrix::from_fn(n_states, n_states, |i, j| {
            0.5 * (dot(&y[i], &ay[j]) + dot(&y[j], &ay[i]))
        });
        let (values, vectors) = jacobi_eigen(hmat);
        let mut order: Vec<usize> = (0..n_states).collect();
        order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).expect("finite"));
        for (slot, &k) in order.iter().enumerate() {
            let mut v = vec![0.0; n];
            let mut av = vec![0.0; n];
            for j in 0..n_states {
                let c = vectors[(j, k)];
                for t in 0..n {
                    v[t] += c * y[j][t];
                    av[t] += c * ay[j][t];
                }
            }
            let lam = values[k];
            let mv = m.matvec(&v);
            let r: Vec<f64> = av.iter().zip(&mv).map(|(p, q)| p - lam * q).collect();
            residuals[slot] = dual_norm(&r);
            lambdas[slot] = lam;
            x[slot] = v;
        }
        let worst = residuals
            .iter()
            .zip(&lambdas)
            .map(|(r, l)| r / (1.0 + l.abs()))
            .fold(0.0, f64::max);
        if worst < best {
            if worst < 0.9 * best {
                since_best = 0;
            }
            best = worst;
            best_state = (x.clone(), lambdas.clone(), residuals.clone());
        } else {
            since_best += 1;
        }
        if worst <= opts.tolerance || (since_best > 30 && best < 1e-8) {
            break;
        }
    }
    let (x, lambdas, residuals) = best_state;
    let worst = best;
    if !(worst < 1e-6) {
        return Err(Error::NoConvergence(format!(
            "eigen solver stalled with relative residual {worst:.3e}"
        )));
    }
    Ok(x.into_iter()
        .zip(lambdas.iter().zip(&residuals))
        .map(|(mut v, (&lambda, &residual))| {
            fix_sign(&mut v);
            v.push(0.0);
            EigenPair {
                lambda,
                field: RadialField {
                    space: space.clone(),
                    values: v,
                },
                residual,
            }
        })
        .collect())
}

/// Lowest `n_states` eigenpairs of -t Laplace + W.
pub fn radial_eigensolve(h: &RadialHamiltonian, n_states: usize) -> Result<Vec<EigenPair>> {
    radial_eigensolve_with(h, n_states, None, None, &EigenOptions::default())
}

/// Makes the first clearly nonzero entry positive.
fn fix_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-3 * max) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Modified Gram-Schmidt in the M inner product, applied twice.
pub(crate) fn m_orthonormalize(x: &mut [Vec<f64>], m: &SymBand) -> Result<()> {
    for _ in 0..2 {
        for i in 0..x.len() {
            for j in 0..i {
                let mj = m.matvec(&x[j]);
                let c = dot(&x[i], &mj);
                let (head, tail) = x.split_at_mut(i);
                for (a, b) in tail[0].iter_mut().zip(&head[j]) {
                    *a -= c * b;
                }
            }
            let nrm = m.bilinear(&x[i], &x[i]).sqrt();
            if !(nrm > 1e-300) {
                return Err(Error::Singular(
                    "block vectors became linearly dependent".into(),
                ));
            }
            x[i].iter_mut().for_each(|a| *a /= nrm);
        }
    }
    Ok(())
}

/// Eigenvalues and eigenvectors (columns) of a small symmetric matrix by
/// cyclic Jacobi rotations, which keeps eigenvectors accurate when the
/// matrix is already nearly diagonal.
pub(crate) fn jacobi_eigen(mut a: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut v = DMatrix::identity(n, n);
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |j| *j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].powi(2))
            .sum();
        let diag: f64 = (0..n).map(|i| a[(i, i)].powi(2)).sum();
        if off <= f64::EPSILON.powi(2) * 1e-4 * diag || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)]).collect(), v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_keeps_nearly_diagonal_vectors() {
        let h = DMatrix::from_row_slice(2, 2, &[-4.5, 1e-12, 1e-12, -1.12]);
        let (vals, vecs) = jacobi_eigen(h);
        let k = if vals[0] < vals[1] { 0 } else { 1 };
        assert!((vals[k] + 4.5).abs() < 1e-15);
        assert!(vecs[(1, k)].abs() < 1e-11);
    }

    #[test]
    fn jacobi_diagonalizes() {
        let h = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.5, 1.0, 3.0, -0.2, 0.5, -0.2, 1.0]);
        let (vals, vecs) = jacobi_eigen(h.clone());
        for k in 0..3 {
            let v = vecs.column(k);
            let r = &h * v - v * vals[k];
            assert!(r.norm() < 1e-13);
        }
    }
}
