use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge after {subdivisions} subdivisions (estimate {estimate}, error {error_estimate:e})")]
    QuadratureNotConverged {
        estimate: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    #[error("invalid bracket [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi} do not change sign")]
    InvalidBracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("function returned NaN at x = {x}")]
    NotANumber { x: f64 },

    #[error("root refinement did not reach width {tol:e} within {iterations} iterations")]
    RootNotConverged { tol: f64, iterations: usize },

    #[error("integrator step underflow at x = {x}")]
    StepUnderflow { x: f64 },

    #[error("integrator exceeded {max_steps} steps at x = {x}")]
    TooManySteps { x: f64, max_steps: usize },

    #[error("eigenvalue iteration did not converge ({found} of {dimension} eigenvalues found)")]
    EigenNotConverged {
        dimension: usize,
        found: usize,
        partial: Vec<Complex64>,
    },

    #[error("singular matrix at pivot {pivot}")]
    Singular { pivot: usize },

    #[error("shooting failed for N = {exponent}, E = {energy}, side = {side}: {source}")]
    Shooting {
        exponent: f64,
        energy: f64,
        side: &'static str,
        source: alloc::boxed::Box<Error>,
    },

    #[error("could not bracket a root: {0}")]
    Bracket(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
