//! Numerical kernels shared by the spectral methods.
//!
//! Everything here is a pure function of its inputs.

mod eigen;
mod gamma;
mod matrix;
mod ode;
mod quadrature;
mod roots;
mod trig;

pub use eigen::{
    eig_dense_complex, eig_symmetric, eig_symmetric_tridiagonal, EigenResult, SymmetricEigen,
};
pub use gamma::{gamma, ln_gamma};
pub use matrix::{CMatrix, RMatrix};
pub use ode::{propagate_ode, propagate_system, OdeOptions, OdeState};
pub use quadrature::{integrate, QuadratureSpec};
pub use roots::refine_root;
pub use trig::{cos_pi, half_pi_phase, sin_pi};
