//! The potential `V(x) = -(ix)^N`, its classical turning points and the
//! maximal turning pair.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::numerics::{cos_pi, half_pi_phase, sin_pi};
use crate::{Error, Result};

/// Exponent range in which the PT symmetry of the potential is exact and
/// the turning-point regimes below are valid.
pub const EXPONENT_RANGE: (f64, f64) = (2.0, 12.0);

/// The isolated points of the Dirichlet spectrum.
pub const ISOLATED_POINTS: [f64; 2] = [4.0, 8.0];

/// The potential `V(x) = -(ix)^N` in units `2m = hbar = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PotentialSpec {
    exponent: f64,
}

impl PotentialSpec {
    /// Exponent `N` in `[2, 12]`.
    pub fn new(exponent: f64) -> Result<Self> {
        let (lo, hi) = EXPONENT_RANGE;
        if !(lo..=hi).contains(&exponent) {
            return Err(Error::domain(format!(
                "exponent N = {exponent} outside [{lo}, {hi}]"
            )));
        }
        Ok(Self { exponent })
    }

    /// Any finite positive exponent; warns when outside `[2, 12]`.
    pub fn with_override(exponent: f64) -> Result<Self> {
        if !(exponent.is_finite() && exponent > 0.0) {
            return Err(Error::domain(format!("exponent N = {exponent} must be finite and positive")));
        }
        let (lo, hi) = EXPONENT_RANGE;
        if !(lo..=hi).contains(&exponent) {
            log::warn!("exponent N = {exponent} outside [{lo}, {hi}]: PT symmetry is not guaranteed to be exact");
        }
        Ok(Self { exponent })
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn is_integer(&self) -> bool {
        self.exponent.fract() == 0.0
    }

    /// Distance from `N` to the nearest isolated point.
    pub fn ip_distance(&self) -> f64 {
        ISOLATED_POINTS
            .iter()
            .map(|p| (self.exponent - p).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// `V(x)` on the real line: `-|x|^N exp(i N pi/2 sign x)`, `V(0) = 0`.
    ///
    /// `V(-x)` is the exact complex conjugate of `V(x)`.
    pub fn evaluate(&self, x: f64) -> Complex64 {
        if x == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let mag = x.abs().powf(self.exponent);
        let phase = half_pi_phase(self.exponent);
        let v = -phase * mag;
        if x > 0.0 {
            v
        } else {
            v.conj()
        }
    }

    /// `-(iz)^N` on the principal branch, for complex `z`.
    pub fn evaluate_complex(&self, z: Complex64) -> Complex64 {
        let w = Complex64::new(-z.im, z.re);
        if w.norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if self.is_integer() && self.exponent.abs() < i32::MAX as f64 {
            -w.powi(self.exponent as i32)
        } else {
            -w.powf(self.exponent)
        }
    }

    /// The coefficient `q(x) = E - V(x)` of `psi'' + q psi = 0`.
    pub fn q(&self, energy: f64, x: f64) -> Complex64 {
        Complex64::new(energy, 0.0) - self.evaluate(x)
    }
}

/// Free-function form of [`PotentialSpec::evaluate`].
pub fn evaluate_potential(spec: &PotentialSpec, x: f64) -> Complex64 {
    spec.evaluate(x)
}

/// A classical turning point, a root of `-(ix)^N = E`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TurningPoint {
    /// Root index; the PT partner of root `k` carries index `-k - 1`.
    pub k: i32,
    pub x: Complex64,
    /// `|-(ix)^N - E|` on the principal branch.
    pub residual: f64,
}

/// A PT pair `(-conj(x), x)` of turning points with `Re x > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TurningPair {
    pub left: Complex64,
    pub right: Complex64,
    pub k: i32,
    /// `Re(right) / E^(1/N)`.
    pub delta: f64,
}

/// Turning points that passed and failed the residual check.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TurningPointSet {
    pub accepted: Vec<TurningPoint>,
    pub rejected: Vec<TurningPoint>,
}

impl TurningPointSet {
    /// Accepted PT pairs, one per distinct pair, smallest `k` first.
    pub fn pairs(&self) -> Vec<TurningPair> {
        let mut out: Vec<TurningPair> = Vec::new();
        for tp in self.accepted.iter().filter(|t| t.k >= 0) {
            let right = if tp.x.re >= 0.0 { tp.x } else { -tp.x.conj() };
            // the partner of this root must have passed too
            let left = -right.conj();
            let partner_ok = self
                .accepted
                .iter()
                .any(|t| (t.x - left).norm() <= 1e-12 * right.norm().max(1.0));
            if !partner_ok || right.re <= 0.0 {
                continue;
            }
            let duplicate = out
                .iter()
                .any(|p| (p.right - right).norm() <= 1e-12 * right.norm().max(1.0));
            if duplicate {
                continue;
            }
            let scale = right.norm();
            out.push(TurningPair { left, right, k: tp.k, delta: right.re / scale });
        }
        out
    }
}

fn check_energy(energy: f64) -> Result<()> {
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(Error::domain(format!("energy E = {energy} must be positive and finite")));
    }
    Ok(())
}

const RESIDUAL_TOL: f64 = 1e-10;
const MAX_K: i32 = 2;

/// `-i E^(1/N) exp(i pi t)` for an angle `t` in units of pi.
fn root_at(radius: f64, t: f64) -> Complex64 {
    Complex64::new(radius * sin_pi(t), -radius * cos_pi(t))
}

/// Candidate roots `x_k = -i E^(1/N) exp(i (2k+1) pi / N)`, `k = 0, 1, 2`,
/// and their PT partners, split by the residual check.
pub fn turning_points(spec: &PotentialSpec, energy: f64) -> Result<TurningPointSet> {
    check_energy(energy)?;
    let n = spec.exponent();
    let radius = energy.powf(1.0 / n);
    let tol = RESIDUAL_TOL * energy.max(1.0);
    let mut set = TurningPointSet::default();
    for k in 0..=MAX_K {
        let x = root_at(radius, (2 * k + 1) as f64 / n);
        for (idx, z) in [(k, x), (-k - 1, -x.conj())] {
            let residual = (spec.evaluate_complex(z) - energy).norm();
            let tp = TurningPoint { k: idx, x: z, residual };
            if residual <= tol {
                set.accepted.push(tp);
            } else {
                set.rejected.push(tp);
            }
        }
    }
    Ok(set)
}

/// The accepted PT pair with the largest `|Re x|`; ties go to the larger `k`.
pub fn select_maximal_pair(spec: &PotentialSpec, energy: f64) -> Result<TurningPair> {
    let pairs = turning_points(spec, energy)?.pairs();
    let mut best: Option<TurningPair> = None;
    for p in pairs {
        best = match best {
            None => Some(p),
            Some(b) => {
                let tie = (p.delta - b.delta).abs() <= 1e-12 * b.delta.abs().max(1e-300);
                if p.delta > b.delta && !tie || tie && p.k > b.k {
                    Some(p)
                } else {
                    Some(b)
                }
            }
        };
    }
    best.ok_or_else(|| Error::domain(format!("no turning pair survives the residual check at N = {n}", n = spec.exponent())))
}

/// `sin((2K+1) pi / N)` with `K = 0` on `[2, 4]`, `1` on `(4, 8]`, `2` on `(8, 12]`.
pub fn delta_mxtp(exponent: f64) -> Result<f64> {
    let (lo, hi) = EXPONENT_RANGE;
    if !(lo..=hi).contains(&exponent) {
        return Err(Error::domain(format!("exponent N = {exponent} outside [{lo}, {hi}]")));
    }
    let k = if exponent <= 4.0 {
        0
    } else if exponent <= 8.0 {
        1
    } else {
        2
    };
    Ok(sin_pi((2 * k + 1) as f64 / exponent))
}

/// The `k = 0` pair, `x = E^(1/N) exp(i pi (3/2 - 1/N))` and its partner.
pub fn minimal_pair(spec: &PotentialSpec, energy: f64) -> Result<TurningPair> {
    check_energy(energy)?;
    let n = spec.exponent();
    let radius = energy.powf(1.0 / n);
    let right = root_at(radius, 1.0 / n);
    Ok(TurningPair {
        left: -right.conj(),
        right,
        k: 0,
        delta: sin_pi(1.0 / n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn spec(n: f64) -> PotentialSpec {
        PotentialSpec::new(n).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn integer_values() {
        assert_eq!(spec(2.0).evaluate(1.0), c(1.0, 0.0));
        assert_eq!(spec(3.0).evaluate(2.0), c(0.0, 8.0));
        assert_eq!(spec(4.0).evaluate(1.0), c(-1.0, 0.0));
        assert_eq!(spec(3.0).evaluate(0.0), c(0.0, 0.0));
    }

    #[test]
    fn real_line_matches_direct_power_for_integers() {
        for n in 2..=12 {
            let s = spec(n as f64);
            for &x in &[-2.5, -1.0, -0.3, 0.7, 1.9] {
                let direct = -(c(0.0, x)).powi(n);
                let v = s.evaluate(x);
                assert!((v - direct).norm() <= 1e-13 * direct.norm(), "N={n} x={x}");
            }
        }
    }

    #[test]
    fn range_checks() {
        assert!(PotentialSpec::new(1.5).is_err());
        assert!(PotentialSpec::new(12.5).is_err());
        assert!(PotentialSpec::new(f64::NAN).is_err());
        assert!(PotentialSpec::with_override(1.5).is_ok());
        assert!(PotentialSpec::with_override(-1.0).is_err());
    }

    #[test]
    fn harmonic_turning_points() {
        let p = select_maximal_pair(&spec(2.0), 1.0).unwrap();
        assert_relative_eq!(p.right.re, 1.0, epsilon = 1e-15);
        assert!(p.right.im.abs() < 1e-15);
        assert_eq!(p.k, 0);
    }

    #[test]
    fn sextic_k1_root_is_real() {
        let set = turning_points(&spec(6.0), 1.0).unwrap();
        let x1 = set.accepted.iter().find(|t| t.k == 1).unwrap();
        assert!((x1.x - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn cubic_k0_root() {
        let set = turning_points(&spec(3.0), 1.0).unwrap();
        let x0 = set.accepted.iter().find(|t| t.k == 0).unwrap();
        assert!((x0.x - c(0.75f64.sqrt(), -0.5)).norm() < 1e-15);
        assert!(x0.residual < 1e-14);
    }

    #[test]
    fn maximal_pair_examples() {
        let p3 = select_maximal_pair(&spec(3.0), 1.0).unwrap();
        assert_eq!(p3.k, 0);
        assert_relative_eq!(p3.delta, 0.75f64.sqrt(), epsilon = 1e-14);

        let p5 = select_maximal_pair(&spec(5.0), 1.0).unwrap();
        assert_eq!(p5.k, 1);
        let want = c(cos_pi(0.1), sin_pi(0.1));
        assert!((p5.right - want).norm() < 1e-14);
        assert_relative_eq!(p5.delta, sin_pi(0.6), epsilon = 1e-14);

        let p10 = select_maximal_pair(&spec(10.0), 1.0).unwrap();
        assert_eq!(p10.k, 2);
        assert!((p10.right - c(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(p10.delta, 1.0);
    }

    #[test]
    fn regime_table() {
        for i in 0..=200 {
            let n = 2.0 + 0.05 * i as f64;
            let k = select_maximal_pair(&spec(n), 1.0).unwrap().k;
            let want = if n < 4.0 {
                0
            } else if n < 8.0 {
                1
            } else {
                2
            };
            assert_eq!(k, want, "N = {n}");
        }
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_mxtp(2.0).unwrap(), 1.0);
        assert_eq!(delta_mxtp(6.0).unwrap(), 1.0);
        assert_relative_eq!(delta_mxtp(12.0).unwrap(), 0.965_925_826_289_068_3, epsilon = 1e-15);
        assert_relative_eq!(delta_mxtp(4.0).unwrap(), sin_pi(0.75), epsilon = 1e-15);
        assert_relative_eq!(delta_mxtp(8.0).unwrap(), sin_pi(5.0 / 8.0), epsilon = 1e-15);
        assert!(delta_mxtp(1.9).is_err());
    }

    #[test]
    fn delta_matches_selected_pair() {
        for i in 0..=100 {
            let n = 2.0 + 0.1 * i as f64;
            let d = delta_mxtp(n).unwrap();
            let p = select_maximal_pair(&spec(n), 1.0).unwrap();
            assert!((d - p.delta).abs() <= 1e-12, "N = {n}");
        }
    }

    #[test]
    fn minimal_pair_examples() {
        let p2 = minimal_pair(&spec(2.0), 1.0).unwrap();
        assert!((p2.right - c(1.0, 0.0)).norm() < 1e-15);
        let p6 = minimal_pair(&spec(6.0), 1.0).unwrap();
        assert_relative_eq!(p6.right.re, 0.5, epsilon = 1e-15);
        assert_relative_eq!(p6.right.im, -(0.75f64.sqrt()), epsilon = 1e-15);
    }

    #[test]
    fn minimal_and_maximal_coincide_below_four() {
        for i in 0..40 {
            let n = 2.0 + 0.05 * i as f64;
            let a = minimal_pair(&spec(n), 1.0).unwrap();
            let b = select_maximal_pair(&spec(n), 1.0).unwrap();
            assert_eq!(a.right, b.right, "N = {n}");
            assert_eq!(a.left, b.left);
        }
        for i in 1..=160 {
            let n = 4.0 + 0.05 * i as f64;
            let a = minimal_pair(&spec(n), 1.0).unwrap();
            let b = select_maximal_pair(&spec(n), 1.0).unwrap();
            assert!(b.right.re > a.right.re);
            assert!(b.right.im.abs() <= a.right.im.abs() + 1e-15);
        }
    }

    #[test]
    fn hermitian_reductions() {
        for n in [2.0, 6.0, 10.0] {
            let e: f64 = 3.0;
            let p = select_maximal_pair(&spec(n), e).unwrap();
            assert!(p.right.im.abs() < 1e-14);
            assert_relative_eq!(p.right.re, e.powf(1.0 / n), epsilon = 1e-14);
        }
    }

    #[test]
    fn energy_must_be_positive() {
        assert!(turning_points(&spec(3.0), 0.0).is_err());
        assert!(select_maximal_pair(&spec(3.0), -1.0).is_err());
        assert!(minimal_pair(&spec(3.0), f64::NAN).is_err());
    }

    #[test]
    fn wrong_sheet_roots_are_rejected() {
        // at N = 2.5 only k = 0 lies on the principal sheet
        let set = turning_points(&spec(2.5), 1.0).unwrap();
        assert!(set.accepted.iter().all(|t| t.k == 0 || t.k == -1));
        assert_eq!(set.rejected.len(), 4);
    }

    proptest! {
        #[test]
        fn pt_conjugation_is_exact(n in 2.0f64..=12.0, x in -10.0f64..10.0) {
            let s = spec(n);
            let a = s.evaluate(-x);
            let b = s.evaluate(x).conj();
            prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
            prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
        }

        #[test]
        fn accepted_points_and_partners_have_small_residual(n in 2.0f64..=12.0, e in 0.01f64..100.0) {
            let s = spec(n);
            let set = turning_points(&s, e).unwrap();
            let tol = 1e-10 * e.max(1.0);
            for tp in &set.accepted {
                prop_assert!(tp.residual <= tol);
                let partner = -tp.x.conj();
                prop_assert!((s.evaluate_complex(partner) - e).norm() <= tol);
            }
            prop_assert!(!set.pairs().is_empty());
        }

        #[test]
        fn turning_points_scale_with_energy(n in 2.0f64..=12.0, e in 0.01f64..100.0) {
            let s = spec(n);
            let unit = select_maximal_pair(&s, 1.0).unwrap();
            let p = select_maximal_pair(&s, e).unwrap();
            let want = unit.right * e.powf(1.0 / n);
            prop_assert!((p.right - want).norm() <= 1e-12 * want.norm());
            prop_assert_eq!(p.left, -p.right.conj());
            prop_assert!(p.delta > 0.0 && p.delta <= 1.0);
        }
    }
}
