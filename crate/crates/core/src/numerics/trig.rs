use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// `sin(pi * t)`, exact at multiples of one half.
pub fn sin_pi(t: f64) -> f64 {
    // reduce to r in [0, 2)
    let r = num_traits::Euclid::rem_euclid(&t, &2.0);
    if r == 0.0 || r == 1.0 {
        return 0.0;
    }
    if r == 0.5 {
        return 1.0;
    }
    if r == 1.5 {
        return -1.0;
    }
    if r < 1.0 {
        (core::f64::consts::PI * r).sin()
    } else {
        -(core::f64::consts::PI * (r - 1.0)).sin()
    }
}

/// `cos(pi * t)`, exact at multiples of one half.
pub fn cos_pi(t: f64) -> f64 {
    sin_pi(t + 0.5)
}

/// `exp(i * N * pi / 2)` with exact values whenever `N` is an integer.
pub fn half_pi_phase(exponent: f64) -> Complex64 {
    let t = 0.5 * exponent;
    Complex64::new(cos_pi(t), sin_pi(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_at_half_integers() {
        assert_eq!(sin_pi(0.5), 1.0);
        assert_eq!(sin_pi(2.5), 1.0);
        assert_eq!(sin_pi(-0.5), -1.0);
        assert_eq!(cos_pi(5.0), -1.0);
        assert_eq!(half_pi_phase(10.0), Complex64::new(-1.0, 0.0));
        assert_eq!(half_pi_phase(5.0), Complex64::new(0.0, 1.0));
        assert_eq!(half_pi_phase(3.0), Complex64::new(0.0, -1.0));
    }

    #[test]
    fn matches_libm_elsewhere() {
        for &t in &[0.1, 0.37, 1.2, 1.9, -0.3, 3.7] {
            let want = (core::f64::consts::PI * t).sin();
            assert!((sin_pi(t) - want).abs() < 1e-14, "t = {t}");
        }
    }
}
