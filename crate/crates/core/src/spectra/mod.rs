//! Independent oracles: diagonalisation in the Laguerre basis, eigenvalue
//! tracking in `eps`, and the radial ODE.

pub mod hamiltonian;
pub mod radial;
pub mod tracking;

pub use hamiltonian::{
    build_hamiltonian, eigen_energies, eigen_system, potential_matrix, Perturbation, PotentialMatrix,
    RadialHamiltonian, Sector,
};
pub use radial::{fitted_growth, growth_exponent, solve_radial, RadialSolution};
pub use tracking::{track_eigenvalue, track_eigenvalue_with, DEFAULT_STEPS};
