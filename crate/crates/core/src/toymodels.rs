//! Four 2x2 parametric matrices contrasting an exceptional point (A), isolated
//! points (B, D) and an analytic family (C).

use alloc::format;
use alloc::vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::numerics::{eig_dense_complex, CMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ToyModel {
    /// `[[5, 2-l], [2+l, 5]]`
    A,
    /// `[[5, l-2], [l-2, 5]]`
    B,
    /// `[[5, l^2], [l^2, 5]]`
    C,
    /// `[[5, 4l], [l, 5]]`
    D,
}

impl ToyModel {
    pub const ALL: [ToyModel; 4] = [ToyModel::A, ToyModel::B, ToyModel::C, ToyModel::D];

    pub fn tag(self) -> char {
        match self {
            ToyModel::A => 'A',
            ToyModel::B => 'B',
            ToyModel::C => 'C',
            ToyModel::D => 'D',
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        match tag {
            "A" | "a" => Ok(ToyModel::A),
            "B" | "b" => Ok(ToyModel::B),
            "C" | "c" => Ok(ToyModel::C),
            "D" | "d" => Ok(ToyModel::D),
            _ => Err(Error::Parse(format!("unknown toy model {tag:?}"))),
        }
    }

    /// Off-diagonal entries `(upper, lower)`.
    fn offdiag(self, lambda: f64) -> (f64, f64) {
        match self {
            ToyModel::A => (2.0 - lambda, 2.0 + lambda),
            ToyModel::B => (lambda - 2.0, lambda - 2.0),
            ToyModel::C => (lambda * lambda, lambda * lambda),
            ToyModel::D => (4.0 * lambda, lambda),
        }
    }

    pub fn matrix(self, lambda: f64) -> CMatrix {
        let (u, l) = self.offdiag(lambda);
        let r = |v: f64| Complex64::new(v, 0.0);
        CMatrix::from_rows(2, 2, vec![r(5.0), r(u), r(l), r(5.0)])
    }
}

fn ordered(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    if (b.re, b.im) < (a.re, a.im) {
        (b, a)
    } else {
        (a, b)
    }
}

/// `5 -+ sqrt(4 - l^2)`, `5 -+ |l - 2|`, `5 -+ l^2`, `5 -+ 2|l|`.
pub fn toy_closed_form(model: ToyModel, lambda: f64) -> (Complex64, Complex64) {
    let five = Complex64::new(5.0, 0.0);
    let s = match model {
        ToyModel::A => Complex64::new(4.0 - lambda * lambda, 0.0).sqrt(),
        ToyModel::B => Complex64::new((lambda - 2.0).abs(), 0.0),
        ToyModel::C => Complex64::new(lambda * lambda, 0.0),
        ToyModel::D => Complex64::new(2.0 * lambda.abs(), 0.0),
    };
    ordered(five - s, five + s)
}

/// Eigenvalues from the dense solver, ordered by real part.
pub fn toy_numeric(model: ToyModel, lambda: f64) -> Result<(Complex64, Complex64)> {
    let ev = eig_dense_complex(&model.matrix(lambda))?.eigenvalues;
    Ok(ordered(ev[0], ev[1]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum PointKind {
    Ep,
    Ip,
    Analytic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PointClass {
    pub lambda_star: f64,
    pub kind: PointKind,
    /// Infinite when the slope grows like `h^(-1/2)`.
    pub left_slope: f64,
    pub right_slope: f64,
    /// Eigenvalues are complex on at least one side; slopes there use `Re E1`.
    pub complex_side: bool,
}

const EP_GROWTH: f64 = core::f64::consts::SQRT_2;
const EP_FLOOR: f64 = 1e-6;
const IP_GAP: f64 = 1e-3;

/// Classifies `lambda_star` from one-sided slopes of the lower branch `E1`
/// at steps `h` and `h/2`.
pub fn classify_point(model: ToyModel, lambda_star: f64, h: f64) -> Result<PointClass> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::domain("step h must be positive"));
    }
    let mut complex_side = false;
    let mut e1 = |l: f64| -> Result<f64> {
        let (a, _) = toy_numeric(model, l)?;
        if a.im.abs() > 1e-12 {
            complex_side = true;
        }
        Ok(a.re)
    };
    let e0 = e1(lambda_star)?;
    let right = |e1: &mut dyn FnMut(f64) -> Result<f64>, h: f64| Ok::<_, Error>((e1(lambda_star + h)? - e0) / h);
    let left = |e1: &mut dyn FnMut(f64) -> Result<f64>, h: f64| Ok::<_, Error>((e0 - e1(lambda_star - h)?) / h);
    let (r1, r2) = (right(&mut e1, h)?, right(&mut e1, 0.5 * h)?);
    let (l1, l2) = (left(&mut e1, h)?, left(&mut e1, 0.5 * h)?);
    let diverges = |s1: f64, s2: f64| s2.abs() > EP_FLOOR && s2.abs() >= EP_GROWTH * s1.abs();
    let (ld, rd) = (diverges(l1, l2), diverges(r1, r2));
    let left_slope = if ld { f64::INFINITY.copysign(l2) } else { 2.0 * l2 - l1 };
    let right_slope = if rd { f64::INFINITY.copysign(r2) } else { 2.0 * r2 - r1 };
    let kind = if ld || rd {
        PointKind::Ep
    } else if (left_slope - right_slope).abs() > IP_GAP * left_slope.abs().max(right_slope.abs()).max(1.0) {
        PointKind::Ip
    } else {
        PointKind::Analytic
    };
    Ok(PointClass { lambda_star, kind, left_slope, right_slope, complex_side })
}

/// Normalized eigenvector of the real 2x2 `[[a, b], [c, d]]` for eigenvalue `e`.
fn eigenvector(a: f64, b: f64, c: f64, d: f64, e: f64) -> (f64, f64) {
    let (x, y) = if (b.abs() + (e - a).abs()) >= (c.abs() + (e - d).abs()) {
        (b, e - a)
    } else {
        (e - d, c)
    };
    let n = x.hypot(y);
    (x / n, y / n)
}

/// `|dE1/dl - <psi1| dB/dl |psi1>|` for model B, central difference with step `h`.
pub fn hft_residual(lambda: f64, h: f64) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::domain("step h must be positive"));
    }
    if lambda == 2.0 {
        return Err(Error::domain("model B is degenerate at lambda = 2"));
    }
    let e1 = |l: f64| toy_numeric(ToyModel::B, l).map(|(a, _)| a.re);
    let slope = (e1(lambda + h)? - e1(lambda - h)?) / (2.0 * h);
    let b = lambda - 2.0;
    let (v0, v1) = eigenvector(5.0, b, b, 5.0, e1(lambda)?);
    // dB/dl = [[0, 1], [1, 0]]
    Ok((slope - 2.0 * v0 * v1).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: (Complex64, Complex64), b: (Complex64, Complex64), tol: f64) -> bool {
        (a.0 - b.0).norm() <= tol && (a.1 - b.1).norm() <= tol
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(toy_closed_form(ToyModel::A, 0.0), (c(3.0, 0.0), c(7.0, 0.0)));
        assert_eq!(toy_closed_form(ToyModel::B, 2.0), (c(5.0, 0.0), c(5.0, 0.0)));
        assert_eq!(toy_closed_form(ToyModel::D, 1.0), (c(3.0, 0.0), c(7.0, 0.0)));
    }

    #[test]
    fn numeric_examples() {
        let a2 = toy_numeric(ToyModel::A, 2.0).unwrap();
        assert!(close(a2, (c(5.0, 0.0), c(5.0, 0.0)), 1e-7));
        let r5 = 5f64.sqrt();
        assert!(close(toy_numeric(ToyModel::A, 3.0).unwrap(), (c(5.0, -r5), c(5.0, r5)), 1e-12));
        assert!(close(toy_numeric(ToyModel::C, 1.5).unwrap(), (c(2.75, 0.0), c(7.25, 0.0)), 1e-12));
    }

    #[test]
    fn closed_form_matches_numeric_on_grid() {
        for model in ToyModel::ALL {
            for i in 0..=80 {
                let l = -3.0 + 0.1 * i as f64;
                let a = toy_closed_form(model, l);
                let b = toy_numeric(model, l).unwrap();
                assert!(close(a, b, 1e-10), "{model:?} l={l}: {a:?} {b:?}");
            }
        }
    }

    #[test]
    fn classification() {
        for l in [2.0, -2.0] {
            let p = classify_point(ToyModel::A, l, 1e-4).unwrap();
            assert_eq!(p.kind, PointKind::Ep, "{p:?}");
            assert!(p.complex_side);
        }
        let b = classify_point(ToyModel::B, 2.0, 1e-4).unwrap();
        assert_eq!(b.kind, PointKind::Ip);
        assert!((b.left_slope - 1.0).abs() < 1e-6 && (b.right_slope + 1.0).abs() < 1e-6, "{b:?}");
        assert!(((b.right_slope - b.left_slope).abs() - 2.0).abs() < 1e-3);
        let d = classify_point(ToyModel::D, 0.0, 1e-4).unwrap();
        assert_eq!(d.kind, PointKind::Ip);
        assert!(((d.right_slope - d.left_slope).abs() - 4.0).abs() < 1e-3);
        for i in 0..=80 {
            let l = -3.0 + 0.1 * i as f64;
            assert_eq!(classify_point(ToyModel::C, l, 1e-4).unwrap().kind, PointKind::Analytic, "l={l}");
        }
        assert_eq!(classify_point(ToyModel::B, 0.5, 1e-4).unwrap().kind, PointKind::Analytic);
        assert!(classify_point(ToyModel::B, 0.5, 0.0).is_err());
    }

    #[test]
    fn curves_continuous_at_ips() {
        for (model, l) in [(ToyModel::B, 2.0), (ToyModel::D, 0.0)] {
            let e = |x: f64| toy_numeric(model, x).unwrap().0.re;
            assert!((e(l - 1e-6) - e(l)).abs() < 1e-5);
            assert!((e(l + 1e-6) - e(l)).abs() < 1e-5);
        }
    }

    #[test]
    fn hellmann_feynman() {
        for l in [0.0, 3.0, 1.9, -2.5, 4.7] {
            assert!(hft_residual(l, 1e-5).unwrap() <= 1e-6, "l={l}");
        }
        assert!(hft_residual(2.0, 1e-5).is_err());
    }

    #[test]
    fn tags() {
        for m in ToyModel::ALL {
            assert_eq!(ToyModel::from_tag(&alloc::string::String::from(m.tag())).unwrap(), m);
        }
        assert!(ToyModel::from_tag("E").is_err());
    }
}
