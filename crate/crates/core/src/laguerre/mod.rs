//! Laguerre polynomials, Gauss–Laguerre quadrature, terminating `3F2` sums
//! and the overlap coefficients `A_{k,s,t,l}`.

pub mod gamma;
pub mod hyper;
pub mod overlap;
pub mod poly;
pub mod quadrature;

pub use hyper::{f32_terminating, HyperMode};
pub use overlap::{
    matrix_element, overlap_closed, overlap_closed_exact, overlap_quadrature, overlap_quadrature_scaled,
    overlap_sign, OverlapTable, Provenance,
};
pub use poly::{laguerre_eval, norm_constant, radial_eigenfunction, radial_eigenfunction_log, RadialMode};
pub use quadrature::{cached_rule, gauss_laguerre_rule, normalized_functions, OracleValue, OverlapOracle, QuadratureRule};
