//! Weak-coupling bound states of shallow one-dimensional wells.
//!
//! The crate computes the expansion `E(s) = c_2 s² + … + c_6 s⁶` of the
//! ground-state energy of `H = -d²/dx² - s·shape(x)`, resums it, and checks
//! it against exact, shooting and variational energies.

pub mod error;
pub mod greens;
pub mod oracles;
pub mod perturbation;
pub mod potential;
pub mod quadrature;
pub mod resummation;
pub mod variational;

pub use error::{Error, Result};
pub use perturbation::{energy_series, ClusterTerm, EnergySeries, TermTable};
pub use potential::{Potential, Shape};
pub use quadrature::{build_grid, GridFunction, GridSpec, QuadratureGrid};
