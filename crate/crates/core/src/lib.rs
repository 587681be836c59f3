//! Dirichlet spectra of the PT-symmetric potential `V(x) = -(ix)^N`.
//!
//! Three independent routes to the real discrete spectrum `E_n(N)` for
//! `2 <= N < 12`, in units `2m = hbar = 1`:
//!
//! - [`semiclassical`]: two-turning-point complex WKB with the *maximal*
//!   turning pair (plus the classic minimal-pair formula and the Hermitian
//!   `|x|^N` well for comparison),
//! - [`shooting`]: integration of `psi'' + [E + (ix)^N] psi = 0` on the real
//!   line with `psi(+-d) = 0`,
//! - [`hobasis`]: diagonalization of `H = p^2 - X^N` in a truncated
//!   harmonic-oscillator basis.
//!
//! [`sweep`] runs the methods over a grid of exponents and locates the
//! isolated points `N = 4, 8` where `E_n(N)` is continuous but has a kink.
//! [`toymodels`] holds the 2x2 matrix families that illustrate exceptional
//! versus isolated points.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the CLI and
//! parallel orchestration live in the `ptdirichlet` companion crate.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod hobasis;
pub mod numerics;
pub mod potential;
pub mod reference;
pub mod semiclassical;
pub mod shooting;
pub mod sweep;
pub mod toymodels;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use potential::PotentialSpec;
