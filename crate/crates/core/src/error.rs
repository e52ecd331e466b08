use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed potential spec: {0}")]
    MalformedSpec(String),

    #[error("invalid truncation order {order} (must be in {min}..={max})")]
    InvalidOrder { order: usize, min: usize, max: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid mode: {0}")]
    InvalidMode(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("unsupported precision: {0}")]
    UnsupportedPrecision(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("basis window too small: need M >= {required}, got {given}")]
    TruncationWindow { required: usize, given: usize },

    #[error("branch ambiguity at eps = {eps}: eigenvalues {lower} and {upper} collide")]
    BranchAmbiguity { eps: f64, lower: f64, upper: f64 },

    #[error("integrator failure: {0}")]
    IntegratorFailure(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("V''(0) = 0: the leading term of the expansion vanishes")]
    DegenerateLead,

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("energies of sectors {ell_a} and {ell_b} are not distinct ({energy_a} vs {energy_b})")]
    Distinctness {
        ell_a: usize,
        ell_b: usize,
        energy_a: f64,
        energy_b: f64,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
