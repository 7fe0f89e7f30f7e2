//! Self-consistent solution of the coupled radial system
//!
//!   (-t Laplace + V) phi_i + sum_{s,a,b} c^{is}_{ab} u_ab phi_s = lambda_i phi_i
//!   -Laplace u_ab = 4 pi phi_a phi_b
//!
//! by damped fixed-point iteration between eigensolves with frozen pair
//! potentials and Poisson updates of the pair potentials.

use crate::error::{invalid, Error, Result};
use crate::io::fmt_f64;
use crate::potentials::{CentralPotential, PotentialSpec};
use crate::radial_pde::eigen::dot;
use crate::radial_pde::{
    radial_eigensolve_with, CouplingTerm, EigenOptions, FemSpace, GradedRadialGrid, LowRank,
    PoissonSolver, RadialField, RadialHamiltonian, RadialOde,
};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// One nonzero entry c^{orbital, partner}_{a b} of the coupling tensor
/// (indices start at 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingEntry {
    pub orbital: usize,
    pub partner: usize,
    pub a: usize,
    pub b: usize,
    pub value: f64,
}

/// The system to solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub orbitals: usize,
    /// nonzero entries of c; absent entries are zero
    #[serde(default)]
    pub coupling: Vec<CouplingEntry>,
    pub potential: PotentialSpec,
    /// prefactor t of the Laplacian
    pub kinetic: f64,
    pub dim: usize,
}

impl SystemSpec {
    pub fn validate(&self) -> Result<()> {
        if self.orbitals == 0 {
            return invalid("system needs at least one orbital");
        }
        if !(self.kinetic > 0.0 && self.kinetic.is_finite()) {
            return invalid(format!(
                "kinetic prefactor must be positive, got {}",
                self.kinetic
            ));
        }
        if !(2..=3).contains(&self.dim) {
            return invalid(format!("dimension must be 2 or 3, got {}", self.dim));
        }
        self.potential.validate()?;
        if self.potential.dim() != self.dim {
            return invalid(format!(
                "potential lives in dimension {} but the system in {}",
                self.potential.dim(),
                self.dim
            ));
        }
        for c in &self.coupling {
            let n = self.orbitals;
            if c.orbital >= n || c.partner >= n || c.a >= n || c.b >= n {
                return invalid(format!("coupling index out of range in {c:?}"));
            }
            if !c.value.is_finite() {
                return invalid("coupling values must be finite");
            }
        }
        Ok(())
    }

    /// Pairs a <= b with u_ab = u_ba stored once.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.orbitals;
        (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect()
    }

    fn pair_index(&self, a: usize, b: usize) -> usize {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let n = self.orbitals;
        a * n - a * (a + 1) / 2 + b
    }

    /// Coupling terms with pair indices resolved.
    pub fn coupling_terms(&self) -> Vec<CouplingTerm> {
        self.coupling
            .iter()
            .filter(|c| c.value != 0.0)
            .map(|c| CouplingTerm {
                orbital: c.orbital,
                partner: c.partner,
                pair: self.pair_index(c.a, c.b),
                coefficient: c.value,
            })
            .collect()
    }
}

/// Radial discretization parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// outer radius; chosen from the decay rate of the orbitals when absent
    pub outer_radius: Option<f64>,
    pub cells: usize,
    pub grading: f64,
    pub max_width: f64,
    pub degree: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            outer_radius: None,
            cells: 20,
            grading: 0.5,
            max_width: 0.5,
            degree: 8,
        }
    }
}

/// Iteration parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScfConfig {
    pub mixing: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub grid: GridConfig,
}

impl Default for ScfConfig {
    fn default() -> Self {
        Self {
            mixing: 0.5,
            tolerance: 1e-9,
            max_iterations: 300,
            grid: GridConfig::default(),
        }
    }
}

impl ScfConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mixing > 0.0 && self.mixing <= 1.0) {
            return invalid(format!("mixing must lie in (0, 1], got {}", self.mixing));
        }
        if !(self.tolerance > 0.0) {
            return invalid("tolerance must be positive");
        }
        if self.max_iterations == 0 {
            return invalid("max_iterations must be positive");
        }
        let g = &self.grid;
        if g.cells < 8 {
            return invalid(format!("grid needs at least 8 cells, got {}", g.cells));
        }
        if !(g.grading > 0.0 && g.grading < 1.0) {
            return invalid(format!("grading must lie in (0, 1), got {}", g.grading));
        }
        if !(g.max_width > 0.0) {
            return invalid("max_width must be positive");
        }
        if !(1..=16).contains(&g.degree) {
            return invalid(format!("degree must lie in 1..=16, got {}", g.degree));
        }
        if let Some(r) = g.outer_radius {
            if !(r > 0.0 && r.is_finite()) {
                return invalid(format!("outer radius must be positive, got {r}"));
            }
        }
        Ok(())
    }
}

/// Residual norms of both lines of the system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// one per orbital equation
    pub orbital: Vec<f64>,
    /// one per pair a <= b
    pub poisson: Vec<f64>,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.orbital
            .iter()
            .chain(&self.poisson)
            .fold(0.0, |m, v| m.max(*v))
    }
}

/// Orbitals, pair potentials and eigenvalues with convergence information.
#[derive(Debug, Clone)]
pub struct ScfState {
    pub orbitals: Vec<RadialField>,
    pub pairs: Vec<(usize, usize)>,
    pub potentials: Vec<RadialField>,
    pub lambdas: Vec<f64>,
    pub residuals: Residuals,
    pub iterations: usize,
    pub converged: bool,
    /// residual rose in three consecutive iterations at some point
    pub oscillation: bool,
    /// maximal residual at the start of every iteration
    pub history: Vec<f64>,
}

/// JSON summary of a state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScfSummary {
    pub converged: bool,
    pub iterations: usize,
    pub lambdas: Vec<f64>,
    pub orbital_residuals: Vec<f64>,
    pub poisson_residuals: Vec<f64>,
    pub max_residual: f64,
    pub uab_sup_norm: f64,
    pub oscillation: bool,
    /// residual decreased over the last five iterations
    pub monotone_tail: bool,
    pub outer_radius: f64,
    /// e^{-kappa R} with kappa from the highest eigenvalue
    pub tail_estimate: f64,
    pub dofs: usize,
    pub history: Vec<f64>,
}

impl ScfState {
    pub fn space(&self) -> &Arc<FemSpace> {
        &self.orbitals[0].space
    }

    pub fn pair_potential(&self, a: usize, b: usize) -> &RadialField {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let i = self
            .pairs
            .iter()
            .position(|p| *p == (a, b))
            .expect("pair stored");
        &self.potentials[i]
    }

    /// ODE data for derivative recovery.
    pub fn ode(&self, spec: &SystemSpec) -> Result<RadialOde> {
        Ok(RadialOde {
            dim: spec.dim,
            kinetic: spec.kinetic,
            potential: spec.potential.to_central()?,
            lambdas: self.lambdas.clone(),
            pairs: self.pairs.clone(),
            couplings: spec.coupling_terms(),
        })
    }

    pub fn summary(&self, kinetic: f64) -> ScfSummary {
        let space = self.space();
        let r = space.outer_radius();
        let top = self
            .lambdas
            .iter()
            .fold(f64::NEG_INFINITY, |m, v| m.max(*v));
        let tail_estimate = if top < 0.0 {
            (-(-top / kinetic).sqrt() * r).exp()
        } else {
            1.0
        };
        let h = &self.history;
        let monotone_tail = h.len() < 2
            || h[h.len().saturating_sub(5)..]
                .windows(2)
                .all(|w| w[1] <= w[0]);
        ScfSummary {
            converged: self.converged,
            iterations: self.iterations,
            lambdas: self.lambdas.clone(),
            orbital_residuals: self.residuals.orbital.clone(),
            poisson_residuals: self.residuals.poisson.clone(),
            max_residual: self.residuals.max(),
            uab_sup_norm: uab_sup_norm(self),
            oscillation: self.oscillation,
            monotone_tail,
            outer_radius: r,
            tail_estimate,
            dofs: space.n_dofs(),
            history: self.history.clone(),
        }
    }

    /// Orbitals at the nodes: `r,phi_0,...`.
    pub fn orbitals_csv(&self) -> String {
        let header: Vec<String> = (0..self.orbitals.len())
            .map(|i| format!("phi_{i}"))
            .collect();
        nodal_csv(self.space(), &header, &self.orbitals)
    }

    /// Pair potentials at the nodes: `r,u_0_0,...`.
    pub fn potentials_csv(&self) -> String {
        let header: Vec<String> = self
            .pairs
            .iter()
            .map(|(a, b)| format!("u_{a}_{b}"))
            .collect();
        nodal_csv(self.space(), &header, &self.potentials)
    }
}

fn nodal_csv(space: &FemSpace, header: &[String], fields: &[RadialField]) -> String {
    let mut out = format!("r,{}\n", header.join(","));
    for (i, r) in space.node_coords().iter().enumerate() {
        out.push_str(&fmt_f64(*r));
        for f in fields {
            out.push(',');
            out.push_str(&fmt_f64(f.values[i]));
        }
        out.push('\n');
    }
    out
}

/// max_{a,b} sup |u_ab| over the nodes.
pub fn uab_sup_norm(state: &ScfState) -> f64 {
    state
        .potentials
        .iter()
        .map(RadialField::max_abs)
        .fold(0.0, f64::max)
}

/// Decay rate of the slowest orbital of the uncoupled problem, used to place
/// the outer boundary where the orbitals are below 1e-10 relative.
fn default_outer_radius(spec: &SystemSpec, central: &CentralPotential) -> f64 {
    let z = central.charge.max(0.0);
    if central.smooth.len() > 2 && central.smooth[2] > 0.0 {
        // Gaussian decay exp(-sqrt(k/t) r^2 / 2)
        let s = (central.smooth[2] / spec.kinetic).sqrt();
        return (2.0 * 30.0 / s).sqrt().max(6.0);
    }
    if z > 0.0 {
        // hydrogenic level n decays like exp(-Z r / (t n (d-1))); the factor 2
        // leaves room for screening by the couplings
        let n = spec.orbitals as f64;
        let kappa = z / (spec.kinetic * n * (spec.dim as f64 - 1.0));
        return (2.0 * 23.0 / kappa).clamp(10.0, 400.0);
    }
    40.0
}

/// Finite element space described by the grid configuration.
pub fn build_space(spec: &SystemSpec, grid: &GridConfig) -> Result<Arc<FemSpace>> {
    let central = spec.potential.to_central()?;
    let r = grid
        .outer_radius
        .unwrap_or_else(|| default_outer_radius(spec, &central));
    let g = GradedRadialGrid::build(r, grid.cells, grid.grading)?.with_max_width(grid.max_width)?;
    Ok(Arc::new(FemSpace::new(g, grid.degree, spec.dim)?))
}

/// u_ab = Poisson(phi_a phi_b) for all pairs a <= b; distinct pairs in parallel.
pub fn update_potentials(
    solver: &PoissonSolver,
    orbitals: &[RadialField],
) -> Result<Vec<RadialField>> {
    let n = orbitals.len();
    let at_q: Vec<Vec<f64>> = orbitals.iter().map(RadialField::at_quad).collect();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect();
    let solve = |(a, b): (usize, usize)| {
        let rho: Vec<f64> = at_q[a].iter().zip(&at_q[b]).map(|(x, y)| x * y).collect();
        solver.solve(&rho)
    };
    if pairs.len() == 1 {
        return Ok(vec![solve(pairs[0])?]);
    }
    std::thread::scope(|s| {
        let handles: Vec<_> = pairs.iter().map(|&p| s.spawn(move || solve(p))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("Poisson worker panicked"))
            .collect()
    })
}

/// Shared discrete operators of one SCF run.
struct Discretization {
    space: Arc<FemSpace>,
    central: CentralPotential,
    poisson: PoissonSolver,
    couplings: Vec<CouplingTerm>,
    kinetic: f64,
}

impl Discretization {
    /// W_i at quadrature points: sum of diagonal couplings c^{ii}_{ab} u_ab.
    fn diagonal_extra(&self, i: usize, potentials_q: &[Vec<f64>]) -> Vec<f64> {
        let mut w = vec![0.0; potentials_q[0].len()];
        for c in self
            .couplings
            .iter()
            .filter(|c| c.orbital == i && c.partner == i)
        {
            for (x, u) in w.iter_mut().zip(&potentials_q[c.pair]) {
                *x += c.coefficient * u;
            }
        }
        w
    }

    /// Load vector of sum_{s != i} c^{is}_{ab} u_ab phi_s.
    fn offdiagonal_load(
        &self,
        i: usize,
        potentials_q: &[Vec<f64>],
        orbitals_q: &[Vec<f64>],
    ) -> Option<Vec<f64>> {
        let mut f = vec![0.0; potentials_q[0].len()];
        let mut any = false;
        for c in self
            .couplings
            .iter()
            .filter(|c| c.orbital == i && c.partner != i)
        {
            any = true;
            for ((x, u), p) in f
                .iter_mut()
                .zip(&potentials_q[c.pair])
                .zip(&orbitals_q[c.partner])
            {
                *x += c.coefficient * u * p;
            }
        }
        any.then(|| self.space.load(&f))
    }

    fn hamiltonian(&self, extra: &[f64]) -> Result<RadialHamiltonian> {
        RadialHamiltonian::new(self.space.clone(), self.kinetic, &self.central, Some(extra))
    }

    /// Residual norms and Rayleigh-quotient eigenvalues of the current orbitals.
    fn residuals(
        &self,
        orbitals: &[RadialField],
        potentials: &[RadialField],
    ) -> Result<(Residuals, Vec<f64>)> {
        let n = self.space.n_dofs() - 1;
        let m = self.space.mass().truncate(n);
        let m_fac = m.cholesky()?;
        let orbitals_q: Vec<Vec<f64>> = orbitals.iter().map(RadialField::at_quad).collect();
        let potentials_q: Vec<Vec<f64>> = potentials.iter().map(RadialField::at_quad).collect();
        let mut orbital = Vec::with_capacity(orbitals.len());
        let mut lambdas = Vec::with_capacity(orbitals.len());
        for (i, phi) in orbitals.iter().enumerate() {
            let h = self.hamiltonian(&self.diagonal_extra(i, &potentials_q))?;
            let x = &phi.values[..n];
            let mut ax = h.matrix().truncate(n).matvec(x);
            if let Some(b) = self.offdiagonal_load(i, &potentials_q, &orbitals_q) {
                for (a, v) in ax.iter_mut().zip(&b) {
                    *a += v;
                }
            }
            let mx = m.matvec(x);
            let lambda = dot(x, &ax) / dot(x, &mx);
            let r: Vec<f64> = ax.iter().zip(&mx).map(|(a, b)| a - lambda * b).collect();
            orbital.push(dot(&r, &m_fac.solve(&r)).max(0.0).sqrt());
            lambdas.push(lambda);
        }
        let n_orb = orbitals.len();
        let mut poisson = Vec::with_capacity(potentials.len());
        let mut k = 0;
        for a in 0..n_orb {
            for b in a..n_orb {
                let rho: Vec<f64> = orbitals_q[a]
                    .iter()
                    .zip(&orbitals_q[b])
                    .map(|(x, y)| x * y)
                    .collect();
                poisson.push(self.poisson.residual(&potentials[k], &rho));
                k += 1;
            }
        }
        Ok((Residuals { orbital, poisson }, lambdas))
    }

    /// New orbital i from the eigenproblem with frozen potentials: the
    /// eigenvector among the lowest i + 1 with largest overlap with the
    /// current orbital. Off-diagonal couplings enter as a symmetric rank-two
    /// term that reproduces them exactly on the current orbital.
    fn eigen_update(
        &self,
        i: usize,
        orbitals: &[RadialField],
        potentials_q: &[Vec<f64>],
        orbitals_q: &[Vec<f64>],
    ) -> Result<(f64, RadialField)> {
        let n = self.space.n_dofs() - 1;
        let h = self.hamiltonian(&self.diagonal_extra(i, potentials_q))?;
        let x0 = &orbitals[i].values[..n];
        let m = self.space.mass().truncate(n);
        let y = m.matvec(x0);
        let low_rank = self
            .offdiagonal_load(i, potentials_q, orbitals_q)
            .map(|mut b| {
                b.truncate(n);
                let bx = dot(&b, x0);
                LowRank {
                    vectors: vec![b, y.clone()],
                    coefs: DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, -bx]),
                }
            });
        let states = i + 1;
        let pairs = radial_eigensolve_with(
            &h,
            states,
            low_rank.as_ref(),
            Some(&orbitals[..states]),
            &EigenOptions::default(),
        )?;
        let best = pairs
            .into_iter()
            .map(|p| {
                let overlap = dot(&p.field.values[..n], &y);
                (overlap, p)
            })
            .max_by(|a, b| a.0.abs().partial_cmp(&b.0.abs()).expect("finite overlap"))
            .expect("at least one state");
        let (overlap, mut pair) = best;
        if overlap < 0.0 {
            pair.field.values.iter_mut().for_each(|v| *v = -*v);
        }
        Ok((pair.lambda, pair.field))
    }
}

fn normalize(field: &mut RadialField) -> Result<()> {
    let norm = field.l2_norm();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::Singular("orbital has zero norm".into()));
    }
    field.values.iter_mut().for_each(|v| *v /= norm);
    Ok(())
}

/// Solves the system. Non-convergence within the iteration budget returns
/// the last state with `converged = false`.
///
/// Without an explicit outer radius, the boundary is moved out and the
/// system re-solved until exp(-kappa R) < [`TAIL_TOLERANCE`], with kappa the
/// decay rate sqrt(-lambda / t) of the least bound orbital.
pub fn scf_solve(spec: &SystemSpec, config: &ScfConfig) -> Result<ScfState> {
    spec.validate()?;
    config.validate()?;
    let mut grid = config.grid;
    let auto = grid.outer_radius.is_none();
    let central = spec.potential.to_central()?;
    let mut radius = grid
        .outer_radius
        .unwrap_or_else(|| default_outer_radius(spec, &central));
    for _ in 0..4 {
        grid.outer_radius = Some(radius);
        let state = scf_solve_on(spec, config, build_space(spec, &grid)?)?;
        let top = state
            .lambdas
            .iter()
            .fold(f64::NEG_INFINITY, |m, v| m.max(*v));
        if !auto || !state.converged || top >= 0.0 {
            return Ok(state);
        }
        // 20% margin for the algebraic prefactor of the Coulomb tail
        let needed = 1.2 * -TAIL_TOLERANCE.ln() / (-top / spec.kinetic).sqrt();
        if needed <= radius {
            return Ok(state);
        }
        // headroom so the shifted eigenvalue of the re-solve does not ask
        // for another marginal extension
        radius = 1.25 * needed;
    }
    Err(Error::NoConvergence("outer radius did not settle".into()))
}

/// Target size of the orbitals at the outer radius.
pub const TAIL_TOLERANCE: f64 = 1e-10;

fn scf_solve_on(spec: &SystemSpec, config: &ScfConfig, space: Arc<FemSpace>) -> Result<ScfState> {
    let disc = Discretization {
        space: space.clone(),
        central: spec.potential.to_central()?,
        poisson: PoissonSolver::new(space.clone())?,
        couplings: spec.coupling_terms(),
        kinetic: spec.kinetic,
    };
    let n_orb = spec.orbitals;

    // uncoupled eigenfunctions as the initial guess
    let linear = RadialHamiltonian::new(space.clone(), spec.kinetic, &disc.central, None)?;
    let init = radial_eigensolve_with(&linear, n_orb, None, None, &EigenOptions::default())?;
    let mut orbitals: Vec<RadialField> = init.iter().map(|p| p.field.clone()).collect();
    let mut lambdas: Vec<f64> = init.iter().map(|p| p.lambda).collect();

    let mut history = Vec::new();
    let mut oscillation = false;
    let mut rises = 0;
    let mut iterations = 0;
    loop {
        let potentials = update_potentials(&disc.poisson, &orbitals)?;
        let (residuals, rayleigh) = disc.residuals(&orbitals, &potentials)?;
        let worst = residuals.max();
        if let Some(&prev) = history.last() {
            rises = if worst > prev { rises + 1 } else { 0 };
            oscillation |= rises >= 3;
        }
        history.push(worst);
        let converged = worst < config.tolerance;
        if converged || iterations >= config.max_iterations {
            if converged {
                lambdas = rayleigh;
            }
            return Ok(ScfState {
                orbitals,
                pairs: spec.pairs(),
                potentials,
                lambdas,
                residuals,
                iterations,
                converged,
                oscillation,
                history,
            });
        }
        iterations += 1;
        let potentials_q: Vec<Vec<f64>> = potentials.iter().map(RadialField::at_quad).collect();
        let orbitals_q: Vec<Vec<f64>> = orbitals.iter().map(RadialField::at_quad).collect();
        let mut next = Vec::with_capacity(n_orb);
        for i in 0..n_orb {
            let (lambda, mut phi) = disc.eigen_update(i, &orbitals, &potentials_q, &orbitals_q)?;
            let mu = config.mixing;
            for (p, old) in phi.values.iter_mut().zip(&orbitals[i].values) {
                *p = mu * *p + (1.0 - mu) * old;
            }
            normalize(&mut phi)?;
            lambdas[i] = lambda;
            next.push(phi);
        }
        orbitals = next;
    }
}

/// Residual norms of a state (eigenvalues taken from the state).
pub fn scf_residual(state: &ScfState, spec: &SystemSpec) -> Result<Residuals> {
    spec.validate()?;
    let space = state.space().clone();
    let disc = Discretization {
        space: space.clone(),
        central: spec.potential.to_central()?,
        poisson: PoissonSolver::new(space.clone())?,
        couplings: spec.coupling_terms(),
        kinetic: spec.kinetic,
    };
    let n = space.n_dofs() - 1;
    let m = space.mass().truncate(n);
    let m_fac = m.cholesky()?;
    let (mut res, _) = disc.residuals(&state.orbitals, &state.potentials)?;
    // recompute orbital residuals with the stored eigenvalues
    let potentials_q: Vec<Vec<f64>> = state.potentials.iter().map(RadialField::at_quad).collect();
    let orbitals_q: Vec<Vec<f64>> = state.orbitals.iter().map(RadialField::at_quad).collect();
    for (i, phi) in state.orbitals.iter().enumerate() {
        let h = disc.hamiltonian(&disc.diagonal_extra(i, &potentials_q))?;
        let x = &phi.values[..n];
        let mut r = h.matrix().truncate(n).matvec(x);
        if let Some(b) = disc.offdiagonal_load(i, &potentials_q, &orbitals_q) {
            r.iter_mut().zip(&b).for_each(|(a, v)| *a += v);
        }
        let mx = m.matvec(x);
        r.iter_mut()
            .zip(&mx)
            .for_each(|(a, v)| *a -= state.lambdas[i] * v);
        res.orbital[i] = dot(&r, &m_fac.solve(&r)).max(0.0).sqrt();
    }
    Ok(res)
}

/// One more fixed-point sweep from `state` (mixing 1), returning the new
/// eigenvalues.
pub fn scf_sweep(state: &ScfState, spec: &SystemSpec) -> Result<Vec<f64>> {
    let space = state.space().clone();
    let disc = Discretization {
        space: space.clone(),
        central: spec.potential.to_central()?,
        poisson: PoissonSolver::new(space.clone())?,
        couplings: spec.coupling_terms(),
        kinetic: spec.kinetic,
    };
    let potentials = update_potentials(&disc.poisson, &state.orbitals)?;
    let potentials_q: Vec<Vec<f64>> = potentials.iter().map(RadialField::at_quad).collect();
    let orbitals_q: Vec<Vec<f64>> = state.orbitals.iter().map(RadialField::at_quad).collect();
    (0..state.orbitals.len())
        .map(|i| {
            disc.eigen_update(i, &state.orbitals, &potentials_q, &orbitals_q)
                .map(|p| p.0)
        })
        .collect()
}
