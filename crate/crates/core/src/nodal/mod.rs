//! Quasimode windows and nodal measures of spherical-harmonic combinations.

pub mod harmonics;
pub mod measure;
pub mod quasimode;
pub mod window;

pub use harmonics::{sph_eval, SphericalCombo, Term};
pub use measure::{
    calibrate_pure_tones, icosphere, mixed_frequency_bound_check, nodal_measure, nodal_measure_rotated,
    MixedFrequencyReport, NodalSample,
};
pub use quasimode::{finite_radius_convergence, limit_nodal_measure, LimitNodal, RadiusRecord};
pub use window::{quasimode_window, QuasimodeWindow};
