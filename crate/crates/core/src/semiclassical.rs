//! Closed-form two-turning-point WKB energies and the numerical action
//! integral that cross-checks them.

use alloc::format;

#[allow(unused_imports)]
use num_traits::Float;

use crate::numerics::{integrate, ln_gamma, refine_root, sin_pi, QuadratureSpec};
use crate::potential::{delta_mxtp, EXPONENT_RANGE};
use crate::{Error, Result};

/// Which quantization formula produced an energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum WkbMethod {
    /// Minimal turning pair, `Delta = sin(pi/N)`.
    Bb,
    /// Maximal turning pair.
    Mxtp,
    /// The Hermitian well `|x|^N`, `Delta = 1`.
    Hermitian,
    /// Maximal pair, action integral done by quadrature and inverted numerically.
    ActionNumeric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WkbEnergy {
    pub n: u32,
    pub exponent: f64,
    pub energy: f64,
    pub method: WkbMethod,
}

/// `[Gamma(3/2+1/N) sqrt(pi) (n+1/2) / (delta Gamma(1+1/N))]^(2N/(N+2))`,
/// evaluated through logarithms.
fn quantized(exponent: f64, n: u32, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::domain(format!("non-positive delta {delta} at N = {exponent}")));
    }
    let inv = 1.0 / exponent;
    let log_ratio = ln_gamma(1.5 + inv)? + 0.5 * core::f64::consts::PI.ln() + (n as f64 + 0.5).ln()
        - delta.ln()
        - ln_gamma(1.0 + inv)?;
    Ok((2.0 * exponent / (exponent + 2.0) * log_ratio).exp())
}

fn check_min(exponent: f64, min: f64) -> Result<()> {
    if !(exponent.is_finite() && exponent >= min) {
        return Err(Error::domain(format!("exponent N = {exponent} must be >= {min}")));
    }
    Ok(())
}

/// Minimal-pair formula with `Delta = sin(pi/N)`.
pub fn energy_bb(exponent: f64, n: u32) -> Result<WkbEnergy> {
    check_min(exponent, 2.0)?;
    let energy = quantized(exponent, n, sin_pi(1.0 / exponent))?;
    Ok(WkbEnergy { n, exponent, energy, method: WkbMethod::Bb })
}

/// Maximal-pair formula with `Delta = delta_mxtp(N)`.
pub fn energy_mxtp(exponent: f64, n: u32) -> Result<WkbEnergy> {
    let energy = quantized(exponent, n, delta_mxtp(exponent)?)?;
    Ok(WkbEnergy { n, exponent, energy, method: WkbMethod::Mxtp })
}

/// WKB levels of the Hermitian well `|x|^N`.
pub fn energy_hermitian(exponent: f64, n: u32) -> Result<WkbEnergy> {
    check_min(exponent, 1.0)?;
    let energy = quantized(exponent, n, 1.0)?;
    Ok(WkbEnergy { n, exponent, energy, method: WkbMethod::Hermitian })
}

/// `int_0^1 sqrt(1 - s^N) ds` by adaptive quadrature.
pub fn shape_integral(exponent: f64) -> Result<f64> {
    integrate(
        |s| (1.0 - s.powf(exponent)).max(0.0).sqrt(),
        0.0,
        1.0,
        &QuadratureSpec::default(),
    )
}

fn check_range(exponent: f64) -> Result<()> {
    let (lo, hi) = EXPONENT_RANGE;
    if !(lo..=hi).contains(&exponent) {
        return Err(Error::domain(format!("exponent N = {exponent} outside [{lo}, {hi}]")));
    }
    Ok(())
}

/// Action `int sqrt(E + (ix)^N) dx` between the maximal turning pair,
/// `2 E^(1/2+1/N) Delta int_0^1 sqrt(1-s^N) ds`, with the integral done
/// numerically.
pub fn action_integral(exponent: f64, energy: f64) -> Result<f64> {
    check_range(exponent)?;
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(Error::domain(format!("energy E = {energy} must be positive")));
    }
    let shape = shape_integral(exponent)?;
    Ok(action_from_shape(exponent, energy, delta_mxtp(exponent)?, shape))
}

fn action_from_shape(exponent: f64, energy: f64, delta: f64, shape: f64) -> f64 {
    2.0 * energy.powf(0.5 + 1.0 / exponent) * delta * shape
}

/// Solves `action_integral(N, E) = pi (n + 1/2)` for `E` by bracketing and
/// root refinement.
pub fn invert_action(exponent: f64, n: u32) -> Result<WkbEnergy> {
    check_range(exponent)?;
    let shape = shape_integral(exponent)?;
    let delta = delta_mxtp(exponent)?;
    let target = core::f64::consts::PI * (n as f64 + 0.5);
    let f = |e: f64| action_from_shape(exponent, e, delta, shape) - target;
    let (mut lo, mut hi) = (1.0, 1.0);
    for _ in 0..200 {
        if f(lo) <= 0.0 {
            break;
        }
        lo *= 0.5;
    }
    for _ in 0..200 {
        if f(hi) >= 0.0 {
            break;
        }
        hi *= 2.0;
    }
    if f(lo) > 0.0 || f(hi) < 0.0 {
        return Err(Error::Bracket(format!("action inversion at N = {exponent}, n = {n}")));
    }
    let energy = if f(lo) == 0.0 {
        lo
    } else if f(hi) == 0.0 {
        hi
    } else {
        refine_root(f, lo, hi, 1e-14 * hi)?
    };
    Ok(WkbEnergy { n, exponent, energy, method: WkbMethod::ActionNumeric })
}

/// One-sided slopes `dE_n/dN` of the maximal-pair energy at `n_star`,
/// second-order differences with one Richardson step (`h` and `h/2`).
pub fn left_right_derivative(n_star: f64, n: u32, h: f64) -> Result<(f64, f64)> {
    if !(h > 0.0) {
        return Err(Error::domain("step h must be positive"));
    }
    let e = |x: f64| energy_mxtp(x, n).map(|w| w.energy);
    let one_sided = |h: f64| -> Result<(f64, f64)> {
        let f0 = e(n_star)?;
        let right = (-3.0 * f0 + 4.0 * e(n_star + h)? - e(n_star + 2.0 * h)?) / (2.0 * h);
        let left = (3.0 * f0 - 4.0 * e(n_star - h)? + e(n_star - 2.0 * h)?) / (2.0 * h);
        Ok((left, right))
    };
    let (l1, r1) = one_sided(h)?;
    let (l2, r2) = one_sided(0.5 * h)?;
    Ok(((4.0 * l2 - l1) / 3.0, (4.0 * r2 - r1) / 3.0))
}
