use alloc::collections::BinaryHeap;
use core::cmp::Ordering;

use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Tolerances for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_subdivisions: 1000,
        }
    }
}

// 15-point Kronrod nodes (non-negative half) and weights, with the embedded
// 7-point Gauss weights on the odd-indexed nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| {
        let y = f(x);
        if y.is_nan() {
            Err(Error::NotANumber { x })
        } else {
            Ok(y)
        }
    };
    let fc = eval(center)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = eval(center - dx)? + eval(center + dx)?;
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Ok(Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    })
}

/// Adaptive 7/15-point Gauss-Kronrod quadrature of `f` over `[a, b]`.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate drops below `abs_tol + rel_tol * |result|`. Integrable endpoint
/// singularities in the derivative (such as `sqrt(1 - s^N)` at `s = 1`) are
/// handled by repeated bisection toward the endpoint.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(spec.abs_tol > 0.0 && spec.rel_tol > 0.0 && spec.max_subdivisions >= 1) {
        return Err(Error::domain("quadrature tolerances must be positive"));
    }
    if a == b {
        return Ok(0.0);
    }
    let first = kronrod(&f, a, b)?;
    let mut total = first.value;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut subdivisions = 0;
    loop {
        if total_err <= spec.abs_tol.max(spec.rel_tol * total.abs()) {
            return Ok(total);
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::QuadratureNotConverged {
                estimate: total,
                error_estimate: total_err,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // panel cannot be split further in double precision
            return Err(Error::QuadratureNotConverged {
                estimate: total,
                error_estimate: total_err,
                subdivisions,
            });
        }
        let left = kronrod(&f, worst.a, mid)?;
        let right = kronrod(&f, mid, worst.b)?;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
        // keep the running sums honest against accumulated cancellation
        if subdivisions % 64 == 0 {
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.error).sum();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gamma;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn quarter_circle() {
        let got = integrate(|s| (1.0 - s * s).sqrt(), 0.0, 1.0, &spec()).unwrap();
        assert!((got - core::f64::consts::FRAC_PI_4).abs() < 1e-11);
    }

    #[test]
    fn constant() {
        let got = integrate(|_| 1.0, 0.0, 1.0, &spec()).unwrap();
        assert!((got - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quartic_root_matches_gamma_ratio() {
        let got = integrate(|s| (1.0 - s.powi(4)).sqrt(), 0.0, 1.0, &spec()).unwrap();
        let want = core::f64::consts::PI.sqrt() * gamma(1.25).unwrap() / (2.0 * gamma(1.75).unwrap());
        assert!((got - want).abs() < 1e-11, "{got} vs {want}");
    }

    #[test]
    fn quadrature_gamma_identity_over_exponents() {
        let mut n = 2.0;
        while n <= 12.0 {
            let got = integrate(|s| (1.0 - s.powf(n)).sqrt(), 0.0, 1.0, &spec()).unwrap();
            let want = core::f64::consts::PI.sqrt() * gamma(1.0 + 1.0 / n).unwrap()
                / (2.0 * gamma(1.5 + 1.0 / n).unwrap());
            assert!((got - want).abs() < 1e-9, "N = {n}: {got} vs {want}");
            n += 0.5;
        }
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let got = integrate(|s| s, 1.0, 0.0, &spec()).unwrap();
        assert!((got + 0.5).abs() < 1e-15);
    }

    #[test]
    fn reports_best_estimate_on_failure() {
        let tight = QuadratureSpec {
            abs_tol: 1e-15,
            rel_tol: 1e-15,
            max_subdivisions: 2,
        };
        match integrate(|s| (1.0 - s * s).sqrt(), 0.0, 1.0, &tight) {
            Err(Error::QuadratureNotConverged { estimate, .. }) => {
                assert!((estimate - core::f64::consts::FRAC_PI_4).abs() < 1e-3)
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn nan_integrand_is_an_error() {
        let err = integrate(|s| if s > 0.5 { f64::NAN } else { s }, 0.0, 1.0, &spec());
        assert!(matches!(err, Err(Error::NotANumber { .. })));
    }
}
