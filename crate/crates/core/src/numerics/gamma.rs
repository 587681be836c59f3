use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

// Lanczos approximation, g = 7, nine terms.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(z: f64) -> f64 {
    // z is the shifted argument x - 1
    let mut sum = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    sum
}

/// Gamma function for positive arguments.
///
/// Arguments below 1/2 are lifted with `Gamma(x) = Gamma(x + 1) / x`.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(alloc::format!("gamma requires x > 0, got {x}")));
    }
    if x < 0.5 {
        return Ok(gamma(x + 1.0)? / x);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    let sqrt_two_pi = (2.0 * core::f64::consts::PI).sqrt();
    Ok(sqrt_two_pi * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z))
}

/// Natural log of the gamma function for positive arguments.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(alloc::format!("ln_gamma requires x > 0, got {x}")));
    }
    if x < 0.5 {
        return Ok(ln_gamma(x + 1.0)? - x.ln());
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    let half_ln_two_pi = 0.5 * (2.0 * core::f64::consts::PI).ln();
    Ok(half_ln_two_pi + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: shift the argument up by 50 with the recurrence,
    /// then evaluate Stirling's series with Bernoulli terms through B_20.
    fn ln_gamma_oracle(x: f64) -> f64 {
        let mut shift = 0.0;
        let mut z = x;
        for _ in 0..50 {
            shift += z.ln();
            z += 1.0;
        }
        // B_2k / (2k (2k - 1))
        const B: [f64; 10] = [
            1.0 / 6.0,
            -1.0 / 30.0,
            1.0 / 42.0,
            -1.0 / 30.0,
            5.0 / 66.0,
            -691.0 / 2730.0,
            7.0 / 6.0,
            -3617.0 / 510.0,
            43867.0 / 798.0,
            -174611.0 / 330.0,
        ];
        let mut series = 0.0;
        let mut zpow = z;
        for (k, b) in B.iter().enumerate() {
            let two_k = 2.0 * (k as f64 + 1.0);
            series += b / (two_k * (two_k - 1.0) * zpow);
            zpow *= z * z;
        }
        (z - 0.5) * z.ln() - z + 0.5 * (2.0 * core::f64::consts::PI).ln() + series - shift
    }

    #[test]
    fn trivial_values() {
        assert!((gamma(1.0).unwrap() - 1.0).abs() < 1e-14);
        let half_sqrt_pi = 0.5 * core::f64::consts::PI.sqrt();
        assert!((gamma(1.5).unwrap() - half_sqrt_pi).abs() < 1e-14);
        assert!((gamma(1.5).unwrap() - 0.886_226_925_5).abs() < 1e-10);
    }

    #[test]
    fn four_thirds_against_oracle() {
        let want = ln_gamma_oracle(4.0 / 3.0).exp();
        assert!((want - 0.892_979_511_6).abs() < 1e-10);
        let got = gamma(4.0 / 3.0).unwrap();
        assert!(((got - want) / want).abs() < 1e-13, "{got} vs {want}");
    }

    #[test]
    fn relative_accuracy_on_working_window() {
        let mut x = 0.505;
        while x <= 3.0 {
            let want = ln_gamma_oracle(x).exp();
            let got = gamma(x).unwrap();
            assert!(((got - want) / want).abs() < 1e-12, "x = {x}: {got} vs {want}");
            let lg = ln_gamma(x).unwrap();
            assert!((lg - ln_gamma_oracle(x)).abs() < 1e-12, "ln at x = {x}");
            x += 0.0137;
        }
    }

    #[test]
    fn reflection_spot_check() {
        for &x in &[0.2, 0.35, 0.45] {
            let g1mx = gamma(2.0 - x).unwrap() / (1.0 - x);
            let lhs = gamma(x).unwrap() * g1mx * (core::f64::consts::PI * x).sin()
                / core::f64::consts::PI;
            assert!((lhs - 1.0).abs() < 1e-10, "x = {x}: {lhs}");
        }
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(matches!(gamma(0.0), Err(Error::Domain(_))));
        assert!(matches!(gamma(-1.5), Err(Error::Domain(_))));
        assert!(gamma(f64::NAN).is_err());
    }
}
