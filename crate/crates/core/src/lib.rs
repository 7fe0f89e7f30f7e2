//! Numerical toolkit for weighted analytic regularity of radial nonlinear
//! eigenvalue systems with Coulomb-type point singularities.

pub mod cartesian;
pub mod combinatorics;
pub mod error;
pub mod functions;
pub mod io;
pub mod jet;
pub mod potentials;
pub mod quadrature;
pub mod radial_pde;
pub mod scf;
pub mod sphere;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
