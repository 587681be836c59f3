use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::matrix::{CMatrix, RMatrix};
use crate::{Error, Result};

/// Eigenvalues of a general complex matrix.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub eigenvalues: Vec<Complex64>,
    /// Sum of the subdiagonal entries dropped during deflation, relative to
    /// the Frobenius norm of the input.
    pub residual_norm: f64,
}

/// Eigen-decomposition of a real symmetric matrix, values ascending.
///
/// `vectors` holds one eigenvector per row, in the same order as `values`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Option<RMatrix>,
}

const MAX_SWEEPS_PER_VALUE: usize = 60;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Reduce to upper Hessenberg form with Householder reflections, in place.
fn hessenberg(a: &mut CMatrix) {
    let n = a.rows();
    let mut v = vec![zero(); n];
    for k in 0..n.saturating_sub(2) {
        let mut alpha2 = 0.0;
        for i in k + 1..n {
            alpha2 += a[(i, k)].norm_sqr();
        }
        let alpha = alpha2.sqrt();
        if alpha == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        // v = x + phase * alpha * e1, reflector I - 2 v v^H / (v^H v)
        for i in k + 1..n {
            v[i] = a[(i, k)];
        }
        v[k + 1] += phase * alpha;
        let vnorm2: f64 = (k + 1..n).map(|i| v[i].norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // left: rows k+1.., all columns from k
        let mut w = vec![zero(); n];
        for i in k + 1..n {
            let vc = v[i].conj();
            for (wj, &aij) in w[k..].iter_mut().zip(&a.row(i)[k..]) {
                *wj += vc * aij;
            }
        }
        for i in k + 1..n {
            let vi = v[i] * beta;
            for (aij, &wj) in a.row_mut(i)[k..].iter_mut().zip(&w[k..]) {
                *aij -= vi * wj;
            }
        }
        // right: all rows, columns k+1..
        for i in 0..n {
            let row = a.row_mut(i);
            let mut s = zero();
            for j in k + 1..n {
                s += row[j] * v[j];
            }
            s *= beta;
            for j in k + 1..n {
                row[j] -= s * v[j].conj();
            }
        }
        for i in k + 2..n {
            a[(i, k)] = zero();
        }
    }
}

/// Complex Givens rotation `[c s; -conj(s) c]` mapping `(a, b)` to `(r, 0)`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, zero());
    }
    if an == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    let rho = an.hypot(bn);
    (an / rho, (a / an) * b.conj() / rho)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let m1 = (a + d) * 0.5 + disc;
    let m2 = (a + d) * 0.5 - disc;
    if (m1 - d).norm() < (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

/// All eigenvalues of a square complex matrix by Hessenberg reduction
/// followed by shifted QR sweeps.
pub fn eig_dense_complex(m: &CMatrix) -> Result<EigenResult> {
    assert!(m.is_square());
    let n = m.rows();
    let norm = m.frobenius_norm();
    if !norm.is_finite() {
        return Err(Error::NotANumber { x: norm });
    }
    let mut h = m.clone();
    hessenberg(&mut h);
    let mut eig = vec![zero(); n];
    let mut dropped = 0.0;
    if n == 0 {
        return Ok(EigenResult { eigenvalues: eig, residual_norm: 0.0 });
    }
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    loop {
        // locate the start of the unreduced block ending at hi
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let s = if s == 0.0 { norm } else { s };
            if h[(lo, lo - 1)].norm() <= f64::EPSILON * s {
                dropped += h[(lo, lo - 1)].norm();
                h[(lo, lo - 1)] = zero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[(hi, hi)];
            if hi == 0 {
                break;
            }
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if iter > MAX_SWEEPS_PER_VALUE {
            return Err(Error::EigenNotConverged {
                dimension: n,
                found: n - 1 - hi,
                partial: eig[hi + 1..].to_vec(),
            });
        }
        let mu = if iter % 11 == 0 {
            // exceptional shift to break cycles
            h[(hi, hi)] + Complex64::new(h[(hi, hi - 1)].norm() * 0.75, h[(hi, hi - 1)].norm() * 0.25)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        // implicit single-shift QR sweep on the block lo..=hi
        let mut x = h[(lo, lo)] - mu;
        let mut y = h[(lo + 1, lo)];
        for k in lo..hi {
            let (c, s) = givens(x, y);
            let col0 = if k > lo { k - 1 } else { lo };
            for j in col0..=hi {
                let a = h[(k, j)];
                let b = h[(k + 1, j)];
                h[(k, j)] = a * c + s * b;
                h[(k + 1, j)] = -s.conj() * a + b * c;
            }
            let rmax = (k + 2).min(hi);
            for i in lo..=rmax {
                let a = h[(i, k)];
                let b = h[(i, k + 1)];
                h[(i, k)] = a * c + b * s.conj();
                h[(i, k + 1)] = -a * s + b * c;
            }
            if k + 2 <= hi {
                x = h[(k + 1, k)];
                y = h[(k + 2, k)];
            }
        }
        if total > MAX_SWEEPS_PER_VALUE * n.max(1) {
            return Err(Error::EigenNotConverged {
                dimension: n,
                found: n - 1 - hi,
                partial: eig[hi + 1..].to_vec(),
            });
        }
    }
    let residual_norm = if norm > 0.0 { dropped / norm } else { 0.0 };
    Ok(EigenResult { eigenvalues: eig, residual_norm })
}

/// Householder reduction of a symmetric matrix to tridiagonal form.
/// Returns the diagonal and the subdiagonal.
fn tridiagonalize(m: &RMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.rows();
    let mut a = m.clone();
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        let alpha2: f64 = (k + 1..n).map(|i| a[(i, k)] * a[(i, k)]).sum();
        if alpha2 == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let alpha = if x0 >= 0.0 { -alpha2.sqrt() } else { alpha2.sqrt() };
        for i in k + 1..n {
            v[i] = a[(i, k)];
        }
        v[k + 1] -= alpha;
        let vnorm2: f64 = (k + 1..n).map(|i| v[i] * v[i]).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // A <- (I - beta v v^T) A (I - beta v v^T) on the trailing block
        for i in k + 1..n {
            let row = a.row(i);
            p[i] = beta * (k + 1..n).map(|j| row[j] * v[j]).sum::<f64>();
        }
        let kk = 0.5 * beta * (k + 1..n).map(|i| v[i] * p[i]).sum::<f64>();
        for i in k + 1..n {
            p[i] -= kk * v[i];
        }
        for i in k + 1..n {
            let (vi, pi) = (v[i], p[i]);
            let row = a.row_mut(i);
            for j in k + 1..n {
                row[j] -= vi * p[j] + pi * v[j];
            }
        }
        a[(k + 1, k)] = alpha;
        a[(k, k + 1)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = 0.0;
            a[(k, i)] = 0.0;
        }
    }
    let d = (0..n).map(|i| a[(i, i)]).collect();
    let e = (1..n).map(|i| a[(i, i - 1)]).collect();
    (d, e)
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn eig_symmetric(m: &RMatrix) -> Result<Vec<f64>> {
    assert!(m.is_square());
    let (d, e) = tridiagonalize(m);
    Ok(eig_symmetric_tridiagonal(&d, &e, false)?.values)
}

/// Implicit QL on a symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` (length `diag.len() - 1`).
pub fn eig_symmetric_tridiagonal(diag: &[f64], off: &[f64], want_vectors: bool) -> Result<SymmetricEigen> {
    let n = diag.len();
    assert!(n == 0 || off.len() + 1 == n, "off-diagonal length mismatch");
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(off);
    // row r of z is eigenvector r once converged
    let mut z = if want_vectors { Some(RMatrix::identity(n)) } else { None };
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_SWEEPS_PER_VALUE {
                return Err(Error::EigenNotConverged {
                    dimension: n,
                    found: l,
                    partial: d[..l].iter().map(|&x| Complex64::new(x, 0.0)).collect(),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_mut() {
                    let (head, tail) = z.row_split(i + 1);
                    for (zi, zi1) in head.iter_mut().zip(tail.iter_mut()) {
                        let t = *zi1;
                        *zi1 = s * *zi + c * t;
                        *zi = c * *zi - s * t;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = z.map(|z| RMatrix::from_fn(n, n, |r, c| z[(order[r], c)]));
    Ok(SymmetricEigen { values, vectors })
}
