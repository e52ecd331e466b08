//! Spectral and nodal-set numerics for small radial perturbations of the
//! isotropic harmonic oscillator `H = -(h^2/2)Δ + |x|^2/2 + eps*h*V(|x|^2)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`potentials`] – radial perturbations given by Taylor data in `u = r^2`
//!   and optional bounded closed forms.
//! * [`laguerre`] – Laguerre polynomials, Gauss–Laguerre rules, terminating
//!   `3F2` sums and the closed-form overlap coefficients `A_{k,s,t,l}`.
//! * [`perturbation`] – Rayleigh–Schrödinger coefficients of a radial sector.
//! * [`spectra`] – direct diagonalisation, eigenvalue tracking and the radial
//!   ODE used as independent oracles.
//! * [`asymptotics`] – residual extraction for the large-`n` energy expansion
//!   and the moment and `3F2` expansion checks.
//! * [`nodal`] – quasimode windows and nodal measures on `S^1` and `S^2`.
//! * [`verify`] – the acceptance suites shared by the CLI and the test target.

pub mod asymptotics;
pub mod error;
pub mod laguerre;
pub mod nodal;
pub mod perturbation;
pub mod potentials;
pub mod report;
pub mod spectra;
pub mod verify;

pub use error::{Error, Result};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
