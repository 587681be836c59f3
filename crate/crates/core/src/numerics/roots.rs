use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

const MAX_ITERATIONS: usize = 300;

/// Brent's method on a sign-changing bracket.
///
/// Every iterate stays inside the current bracket; the returned abscissa lies
/// in a final bracket of width at most `tol` across which `f` changes sign
/// (or at which `f` vanishes exactly).
pub fn refine_root<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::domain("root tolerance must be positive"));
    }
    let mut eval = |x: f64| {
        let y = f(x);
        if y.is_nan() {
            Err(Error::NotANumber { x })
        } else {
            Ok(y)
        }
    };
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (eval(a)?, eval(b)?);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::InvalidBracket {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }
    // b is the best estimate, [b, c] the bracket, a the previous iterate
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITERATIONS {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let half_tol = 0.5 * tol;
        let m = 0.5 * (c - b);
        if m.abs() <= half_tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= half_tol && fa.abs() > fb.abs() {
            // inverse quadratic interpolation, or secant when a == c
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (half_tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > half_tol {
            d
        } else {
            half_tol.copysign(m)
        };
        fb = eval(b)?;
    }
    Err(Error::RootNotConverged {
        tol,
        iterations: MAX_ITERATIONS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear() {
        let r = refine_root(|e| e - 3.0, 2.0, 4.0, 1e-10).unwrap();
        assert!((r - 3.0).abs() < 1e-10);
    }

    #[test]
    fn cosine() {
        let r = refine_root(|x: f64| x.cos(), 1.0, 2.0, 1e-10).unwrap();
        assert!((r - core::f64::consts::FRAC_PI_2).abs() < 1e-10);
    }

    #[test]
    fn stays_inside_bracket() {
        let mut seen = std::vec::Vec::new();
        let r = refine_root(
            |x: f64| {
                seen.push(x);
                (x - 0.7).powi(3)
            },
            0.0,
            1.0,
            1e-12,
        )
        .unwrap();
        assert!((r - 0.7).abs() < 1e-4);
        assert!(seen.iter().all(|&x| (0.0..=1.0).contains(&x)));
    }

    #[test]
    fn same_sign_is_rejected() {
        assert!(matches!(
            refine_root(|x| x * x + 1.0, -1.0, 1.0, 1e-8),
            Err(Error::InvalidBracket { .. })
        ));
    }

    #[test]
    fn nan_names_the_abscissa() {
        match refine_root(|x| if x > 0.4 { f64::NAN } else { x - 1.0 }, 0.0, 0.5, 1e-8) {
            Err(Error::NotANumber { x }) => assert!(x > 0.4),
            other => panic!("{other:?}"),
        }
    }
}
