//! Radial discretization: graded grids, finite elements, Poisson and
//! eigenvalue solvers, and derivative recovery from the radial ODE.

pub mod banded;
pub mod bootstrap;
pub mod eigen;
pub mod fem;
pub mod field;
pub mod grid;
pub mod poisson;

pub use bootstrap::{
    axis_cartesian_derivatives, derivative_bootstrap, origin_series, pointwise_bootstrap,
    pointwise_recurrence, Bootstrap, BootstrapMethod, CouplingTerm, RadialOde,
};
pub use eigen::{
    radial_eigensolve, radial_eigensolve_with, EigenOptions, EigenPair, LowRank, RadialHamiltonian,
};
pub use fem::FemSpace;
pub use field::{FieldMetadata, RadialField};
pub use grid::GradedRadialGrid;
pub use poisson::{poisson_solve, PoissonSolver};
