//! Diagonalization of `H = p^2 - X^N` in a truncated harmonic-oscillator
//! basis, `X = i x`.
//!
//! The low-lying spectrum is taken from the equivalent discrete-variable form
//! `Q^T p^2 Q + diag V(lambda_j)`, where `x = Q diag(lambda) Q^T` (the
//! Gauss-Hermite nodes), and from the shift-inverted matrix
//! `(H - sigma)^(-1)`. Both steps keep the large `|lambda|^N` entries from
//! swamping the small eigenvalues.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::numerics::{
    eig_dense_complex, eig_symmetric, eig_symmetric_tridiagonal, half_pi_phase, CMatrix, RMatrix,
};
use crate::potential::PotentialSpec;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BasisOptions {
    pub size: usize,
    /// The stability re-run uses `ceil(growth_factor * size)`.
    pub growth_factor: f64,
    /// Floor of the realness tolerance on `|Im E|`.
    pub imag_tol: f64,
    pub stability_tol: f64,
    /// Shift `sigma` of the inverted matrix `(H - sigma)^(-1)`.
    pub shift: f64,
}

impl Default for BasisOptions {
    fn default() -> Self {
        Self {
            size: 400,
            growth_factor: 1.25,
            imag_tol: 1e-6,
            stability_tol: 1e-2,
            shift: -0.5,
        }
    }
}

impl BasisOptions {
    /// The large-basis profile (`size = 1500`).
    pub fn full_scale() -> Self {
        Self { size: 1500, ..Self::default() }
    }

    pub fn grown_size(&self) -> usize {
        (self.growth_factor * self.size as f64).ceil() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.size < 8 {
            return Err(Error::domain("basis size must be at least 8"));
        }
        if !(self.growth_factor > 1.0) || self.grown_size() <= self.size {
            return Err(Error::domain("growth_factor must enlarge the basis"));
        }
        if !(self.imag_tol > 0.0 && self.stability_tol > 0.0) {
            return Err(Error::domain("tolerances must be positive"));
        }
        if !self.shift.is_finite() {
            return Err(Error::domain("shift must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AcceptedLevel {
    pub n: usize,
    pub energy: f64,
    /// `|E(size) - E(grown size)|`.
    pub stability: f64,
    /// `|Im E|` at the primary size.
    pub imag: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BasisSpectrum {
    pub exponent: f64,
    pub size: usize,
    pub grown_size: usize,
    /// All eigenvalues at `size`, from the shift-inverted solve.
    pub raw: Vec<Complex64>,
    pub accepted: Vec<AcceptedLevel>,
}

impl BasisSpectrum {
    pub fn energies(&self) -> Vec<f64> {
        self.accepted.iter().map(|a| a.energy).collect()
    }
}

fn offdiag(size: usize) -> Vec<f64> {
    (1..size).map(|k| (k as f64 / 2.0).sqrt()).collect()
}

fn check_size(size: usize) -> Result<()> {
    if size < 2 {
        return Err(Error::domain("basis size must be at least 2"));
    }
    Ok(())
}

/// `X = i x`, `x_{m,m+1} = x_{m+1,m} = sqrt((m+1)/2)`.
pub fn build_position_matrix(size: usize) -> Result<CMatrix> {
    check_size(size)?;
    let e = offdiag(size);
    let mut m = CMatrix::zeros(size, size);
    for (k, &v) in e.iter().enumerate() {
        m[(k, k + 1)] = Complex64::new(0.0, v);
        m[(k + 1, k)] = Complex64::new(0.0, v);
    }
    Ok(m)
}

/// `p_{m+1,m} = -i sqrt((m+1)/2)`, `p_{m,m+1} = +i sqrt((m+1)/2)`.
pub fn build_momentum_matrix(size: usize) -> Result<CMatrix> {
    check_size(size)?;
    let e = offdiag(size);
    let mut m = CMatrix::zeros(size, size);
    for (k, &v) in e.iter().enumerate() {
        m[(k, k + 1)] = Complex64::new(0.0, v);
        m[(k + 1, k)] = Complex64::new(0.0, -v);
    }
    Ok(m)
}

/// `p^2` for the truncated basis: real, symmetric, half-bandwidth 2.
fn kinetic(size: usize) -> RMatrix {
    let e = offdiag(size);
    let mut k = RMatrix::zeros(size, size);
    for m in 0..size {
        let below = if m > 0 { e[m - 1] * e[m - 1] } else { 0.0 };
        let above = if m + 1 < size { e[m] * e[m] } else { 0.0 };
        k[(m, m)] = below + above;
        if m + 2 < size {
            let v = -e[m] * e[m + 1];
            k[(m, m + 2)] = v;
            k[(m + 2, m)] = v;
        }
    }
    k
}

/// Returns `S` with `X = i S` after checking the structure.
fn position_part(x: &CMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
    if !x.is_square() {
        return Err(Error::domain("X must be square"));
    }
    let n = x.rows();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    for i in 0..n {
        for j in 0..n {
            let z = x[(i, j)];
            if z.re != 0.0 || z != x[(j, i)] || (i.abs_diff(j) > 1 && z.im != 0.0) {
                return Err(Error::domain("X must be i times a real symmetric tridiagonal matrix"));
            }
        }
        diag[i] = x[(i, i)].im;
        if i + 1 < n {
            off[i] = x[(i, i + 1)].im;
        }
    }
    Ok((diag, off))
}

/// Product of a banded matrix with a tridiagonal one, both given densely.
fn mul_band(a: &CMatrix, band_a: usize, t: &CMatrix) -> CMatrix {
    let n = a.rows();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        let lo = i.saturating_sub(band_a + 1);
        let hi = (i + band_a + 2).min(n);
        for j in lo..hi {
            let mut s = Complex64::new(0.0, 0.0);
            for k in j.saturating_sub(1)..(j + 2).min(n) {
                s += a[(i, k)] * t[(k, j)];
            }
            out[(i, j)] = s;
        }
    }
    out
}

/// `(iS)^N`: repeated multiplication for integer `N`, otherwise
/// `Q diag(|lambda|^N exp(i N pi/2 sign lambda)) Q^T` from `S = Q Lambda Q^T`.
pub fn matrix_power_x(x: &CMatrix, exponent: f64) -> Result<CMatrix> {
    let (diag, off) = position_part(x)?;
    if !(exponent > 0.0 && exponent.is_finite()) {
        return Err(Error::domain("matrix power needs a positive finite exponent"));
    }
    if exponent.fract() == 0.0 && exponent <= 64.0 {
        return Ok(integer_power(x, exponent as usize));
    }
    spectral_power(&diag, &off, exponent)
}

/// The spectral definition of `(iS)^N` for any `N`, bypassing repeated multiplication.
pub fn matrix_power_x_spectral(x: &CMatrix, exponent: f64) -> Result<CMatrix> {
    let (diag, off) = position_part(x)?;
    if !(exponent > 0.0 && exponent.is_finite()) {
        return Err(Error::domain("matrix power needs a positive finite exponent"));
    }
    spectral_power(&diag, &off, exponent)
}

fn integer_power(x: &CMatrix, exponent: usize) -> CMatrix {
    let mut acc = x.clone();
    for band in 1..exponent {
        acc = mul_band(&acc, band, x);
    }
    acc
}

/// `|lambda|^N exp(i N pi/2 sign lambda)`, zero at the origin.
fn branch_power(lambda: f64, exponent: f64) -> Complex64 {
    if lambda == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let p = half_pi_phase(exponent) * lambda.abs().powf(exponent);
    if lambda > 0.0 {
        p
    } else {
        p.conj()
    }
}

fn spectral_power(diag: &[f64], off: &[f64], exponent: f64) -> Result<CMatrix> {
    let n = diag.len();
    let eig = eig_symmetric_tridiagonal(diag, off, true)?;
    let q = eig.vectors.expect("vectors requested");
    let f: Vec<Complex64> = eig.values.iter().map(|&l| branch_power(l, exponent)).collect();
    // sum_r f_r v_r v_r^T with v_r the rows of q
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        let row = out.row_mut(i);
        for r in 0..n {
            let w = f[r] * q[(r, i)];
            if w.norm() == 0.0 {
                continue;
            }
            for (o, &qj) in row.iter_mut().zip(q.row(r)) {
                *o += w * qj;
            }
        }
    }
    Ok(out)
}

/// `H = p p - X^N` in the oscillator basis.
pub fn build_hamiltonian(spec: &PotentialSpec, size: usize) -> Result<CMatrix> {
    let p = build_momentum_matrix(size)?;
    let x = build_position_matrix(size)?;
    Ok(p.matmul(&p).sub(&matrix_power_x(&x, spec.exponent())?))
}

/// `H` in the position-eigenbasis of the truncated `x`.
#[derive(Debug, Clone)]
pub enum GridHamiltonian {
    /// `V(lambda_j)` all real (even integer `N`).
    Real(RMatrix),
    Complex(CMatrix),
}

impl GridHamiltonian {
    pub fn size(&self) -> usize {
        match self {
            GridHamiltonian::Real(m) => m.rows(),
            GridHamiltonian::Complex(m) => m.rows(),
        }
    }

    pub fn to_complex(&self) -> CMatrix {
        match self {
            GridHamiltonian::Real(m) => m.to_complex(),
            GridHamiltonian::Complex(m) => m.clone(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        match self {
            GridHamiltonian::Real(m) => m.frobenius_norm(),
            GridHamiltonian::Complex(m) => m.frobenius_norm(),
        }
    }
}

/// `Q^T p^2 Q + diag V(lambda)`, an orthogonal similarity of [`build_hamiltonian`].
pub fn grid_hamiltonian(spec: &PotentialSpec, size: usize) -> Result<GridHamiltonian> {
    check_size(size)?;
    let eig = eig_symmetric_tridiagonal(&vec![0.0; size], &offdiag(size), true)?;
    let q = eig.vectors.expect("vectors requested");
    let k = kinetic(size);
    // rows of w are K q_r
    let mut w = RMatrix::zeros(size, size);
    for r in 0..size {
        let v = q.row(r);
        let out = w.row_mut(r);
        for i in 0..size {
            let lo = i.saturating_sub(2);
            let hi = (i + 3).min(size);
            out[i] = (lo..hi).map(|j| k[(i, j)] * v[j]).sum();
        }
    }
    let mut b = RMatrix::zeros(size, size);
    for r in 0..size {
        for s in r..size {
            let d: f64 = q.row(r).iter().zip(w.row(s)).map(|(a, c)| a * c).sum();
            b[(r, s)] = d;
            b[(s, r)] = d;
        }
    }
    let pot: Vec<Complex64> = eig.values.iter().map(|&l| spec.evaluate(l)).collect();
    if pot.iter().all(|v| v.im == 0.0) {
        for (i, v) in pot.iter().enumerate() {
            b[(i, i)] += v.re;
        }
        Ok(GridHamiltonian::Real(b))
    } else {
        let mut h = b.to_complex();
        for (i, v) in pot.iter().enumerate() {
            h[(i, i)] += v;
        }
        Ok(GridHamiltonian::Complex(h))
    }
}

/// All eigenvalues of `H` (oscillator-basis form) by direct dense diagonalization.
pub fn raw_spectrum(spec: &PotentialSpec, size: usize) -> Result<Vec<Complex64>> {
    let h = build_hamiltonian(spec, size)?;
    if h.max_abs_imag() == 0.0 {
        return Ok(eig_symmetric(&h.real_part())?.into_iter().map(|e| Complex64::new(e, 0.0)).collect());
    }
    Ok(eig_dense_complex(&h)?.eigenvalues)
}

/// Eigenvalues at one basis size with the magnitude of the largest
/// inverted eigenvalue, `E = sigma + 1/mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftInverted {
    pub energies: Vec<Complex64>,
    pub max_inverse: f64,
}

/// All eigenvalues of `H` from the spectrum of `(H - sigma)^(-1)`.
pub fn shift_inverted_spectrum(spec: &PotentialSpec, size: usize, shift: f64) -> Result<ShiftInverted> {
    let mus: Vec<Complex64> = match grid_hamiltonian(spec, size)? {
        GridHamiltonian::Real(mut m) => {
            for i in 0..size {
                m[(i, i)] -= shift;
            }
            let inv = m.inverse()?;
            let sym = RMatrix::from_fn(size, size, |i, j| 0.5 * (inv[(i, j)] + inv[(j, i)]));
            eig_symmetric(&sym)?.into_iter().map(|e| Complex64::new(e, 0.0)).collect()
        }
        GridHamiltonian::Complex(mut m) => {
            for i in 0..size {
                m[(i, i)] -= shift;
            }
            let inv = m.inverse()?;
            let sym = CMatrix::from_fn(size, size, |i, j| 0.5 * (inv[(i, j)] + inv[(j, i)]));
            eig_dense_complex(&sym)?.eigenvalues
        }
    };
    let max_inverse = mus.iter().map(|m| m.norm()).fold(0.0, f64::max);
    let energies = mus
        .iter()
        .map(|&mu| {
            if mu.norm() == 0.0 {
                Complex64::new(f64::INFINITY, 0.0)
            } else {
                Complex64::new(shift, 0.0) + mu.inv()
            }
        })
        .collect();
    Ok(ShiftInverted { energies, max_inverse })
}

/// Realness tolerance for an eigenvalue recovered from the inverted matrix:
/// the floor, or the rounding level of `1/mu` mapped back to `E`.
fn imag_tolerance(floor: f64, size: usize, e: Complex64, shift: f64, max_inverse: f64) -> f64 {
    let d = (e - shift).norm();
    floor.max(size as f64 * f64::EPSILON * max_inverse * d * d)
}

/// Nearest-neighbour acceptance of real, size-stable eigenvalues.
pub fn accept_levels(
    primary: &ShiftInverted,
    primary_size: usize,
    grown: &ShiftInverted,
    grown_size: usize,
    opts: &BasisOptions,
) -> Vec<AcceptedLevel> {
    let is_real = |z: Complex64, size: usize, max_inv: f64| {
        z.re.is_finite() && z.im.abs() <= imag_tolerance(opts.imag_tol, size, z, opts.shift, max_inv)
    };
    let mut out: Vec<AcceptedLevel> = Vec::new();
    for &e in &primary.energies {
        if !is_real(e, primary_size, primary.max_inverse) {
            continue;
        }
        let best = grown.energies.iter().copied().min_by(|a, b| {
            let da = (a - e).norm();
            let db = (b - e).norm();
            da.total_cmp(&db).then(a.im.abs().total_cmp(&b.im.abs()))
        });
        let Some(m) = best else { continue };
        if !is_real(m, grown_size, grown.max_inverse) {
            continue;
        }
        let stability = (m.re - e.re).abs();
        if stability <= opts.stability_tol {
            out.push(AcceptedLevel { n: 0, energy: e.re, stability, imag: e.im.abs() });
        }
    }
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    for (n, lvl) in out.iter_mut().enumerate() {
        lvl.n = n;
    }
    out
}

/// Diagonalizes at `size` and the grown size and keeps the real, stable levels.
pub fn spectrum(spec: &PotentialSpec, opts: &BasisOptions) -> Result<BasisSpectrum> {
    opts.validate()?;
    let grown_size = opts.grown_size();
    let primary = shift_inverted_spectrum(spec, opts.size, opts.shift)?;
    let grown = shift_inverted_spectrum(spec, grown_size, opts.shift)?;
    Ok(assemble(spec, opts, primary, grown))
}

/// [`spectrum`] from precomputed solves (for callers that run the two sizes
/// concurrently).
pub fn assemble(spec: &PotentialSpec, opts: &BasisOptions, primary: ShiftInverted, grown: ShiftInverted) -> BasisSpectrum {
    let grown_size = opts.grown_size();
    let accepted = accept_levels(&primary, opts.size, &grown, grown_size, opts);
    if accepted.is_empty() {
        log::info!(
            "no stable real eigenvalues for N = {} at sizes {} / {}",
            spec.exponent(),
            opts.size,
            grown_size
        );
    }
    BasisSpectrum {
        exponent: spec.exponent(),
        size: opts.size,
        grown_size,
        raw: primary.energies,
        accepted,
    }
}

/// Writes a matrix as text: one row per line, entries `re,im` separated by spaces.
pub fn format_matrix(m: &CMatrix) -> alloc::string::String {
    let mut s = alloc::string::String::new();
    for i in 0..m.rows() {
        let row: Vec<alloc::string::String> = m.row(i).iter().map(|z| format!("{:e},{:e}", z.re, z.im)).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spec(n: f64) -> PotentialSpec {
        PotentialSpec::new(n).unwrap()
    }

    #[test]
    fn small_matrices() {
        let h = 0.5f64.sqrt();
        let x = build_position_matrix(2).unwrap();
        assert_eq!(x, CMatrix::from_rows(2, 2, vec![c(0.0, 0.0), c(0.0, h), c(0.0, h), c(0.0, 0.0)]));
        let p = build_momentum_matrix(2).unwrap();
        assert_eq!(p, CMatrix::from_rows(2, 2, vec![c(0.0, 0.0), c(0.0, h), c(0.0, -h), c(0.0, 0.0)]));
        assert!(build_position_matrix(1).is_err());
    }

    #[test]
    fn symmetry_of_x_and_p() {
        let x = build_position_matrix(17).unwrap();
        assert_eq!(x.transpose(), x);
        let p = build_momentum_matrix(17).unwrap();
        assert_eq!(p.conj_transpose(), p);
    }

    #[test]
    fn size_three_position_spectrum() {
        let eig = eig_symmetric_tridiagonal(&[0.0; 3], &offdiag(3), false).unwrap();
        let r = 1.5f64.sqrt();
        assert_relative_eq!(eig.values[0], -r, epsilon = 1e-14);
        assert!(eig.values[1].abs() < 1e-14);
        assert_relative_eq!(eig.values[2], r, epsilon = 1e-14);
    }

    #[test]
    fn kinetic_matches_product() {
        let p = build_momentum_matrix(12).unwrap();
        let pp = p.matmul(&p);
        let k = kinetic(12);
        for i in 0..12 {
            for j in 0..12 {
                assert!((pp[(i, j)] - c(k[(i, j)], 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn harmonic_interior_levels() {
        let h = build_hamiltonian(&spec(2.0), 40).unwrap();
        assert!(h.max_abs_imag() == 0.0);
        let ev = eig_symmetric(&h.real_part()).unwrap();
        for (n, e) in ev.iter().take(10).enumerate() {
            assert!((e - (2 * n + 1) as f64).abs() < 1e-8, "{e}");
        }
    }

    #[test]
    fn square_is_negative_semidefinite() {
        let x = build_position_matrix(10).unwrap();
        let x2 = matrix_power_x(&x, 2.0).unwrap();
        assert!(x2.max_abs_imag() == 0.0);
        let ev = eig_symmetric(&x2.real_part()).unwrap();
        assert!(ev.iter().all(|&e| e <= 1e-14));
    }

    #[test]
    fn integer_and_spectral_powers_agree() {
        let x = build_position_matrix(60).unwrap();
        let (d, o) = position_part(&x).unwrap();
        for n in 2..=12 {
            let a = matrix_power_x(&x, n as f64).unwrap();
            let b = spectral_power(&d, &o, n as f64).unwrap();
            let scale = a.max_abs();
            assert!(a.sub(&b).max_abs() <= 1e-9 * scale, "N={n}");
        }
    }

    #[test]
    fn cube_by_hand_at_size_three() {
        // S = Q diag(-r, 0, r) Q^T with r = sqrt(3/2); (iS)^3 = -i S^3
        let x = build_position_matrix(3).unwrap();
        let (d, o) = position_part(&x).unwrap();
        let cube = spectral_power(&d, &o, 3.0).unwrap();
        let s = x.scale(c(0.0, -1.0));
        let want = s.matmul(&s).matmul(&s).scale(c(0.0, -1.0));
        assert!(cube.sub(&want).max_abs() < 1e-14);
    }

    #[test]
    fn power_rejects_wrong_structure() {
        let m = CMatrix::identity(3);
        assert!(matrix_power_x(&m, 2.5).is_err());
    }

    #[test]
    fn hamiltonian_structure() {
        let h6 = build_hamiltonian(&spec(6.0), 30).unwrap();
        assert!(h6.max_abs_imag() <= 1e-12 * h6.max_abs());
        let h3 = build_hamiltonian(&spec(3.0), 30).unwrap();
        assert!(h3.sub(&h3.transpose()).max_abs() <= 1e-12 * h3.max_abs());
        assert!(h3.sub(&h3.conj_transpose()).max_abs() > 1.0);
        let h25 = build_hamiltonian(&spec(2.5), 30).unwrap();
        assert!(h25.sub(&h25.transpose()).max_abs() <= 1e-12 * h25.max_abs());
    }

    #[test]
    fn grid_form_is_similar() {
        for n in [3.0, 4.5] {
            let a = raw_spectrum(&spec(n), 24).unwrap();
            let b = eig_dense_complex(&grid_hamiltonian(&spec(n), 24).unwrap().to_complex()).unwrap().eigenvalues;
            let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for z in &a {
                let best = b.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min);
                assert!(best <= 1e-9 * scale, "N={n}: {z}");
            }
        }
    }

    #[test]
    fn hermitian_reductions_are_real() {
        for n in [2.0, 6.0, 10.0] {
            let h = build_hamiltonian(&spec(n), 50).unwrap();
            assert!(h.max_abs_imag() <= 1e-12 * h.frobenius_norm());
            assert!(raw_spectrum(&spec(n), 50).unwrap().iter().all(|z| z.im == 0.0));
            assert!(matches!(grid_hamiltonian(&spec(n), 50).unwrap(), GridHamiltonian::Real(_)));
        }
    }

    #[test]
    fn harmonic_accepted_levels() {
        let opts = BasisOptions { size: 100, ..Default::default() };
        let s = spectrum(&spec(2.0), &opts).unwrap();
        let e = s.energies();
        for n in 0..5 {
            assert!((e[n] - (2 * n + 1) as f64).abs() < 1e-6, "{}", e[n]);
        }
    }

    #[test]
    fn cubic_ground_state() {
        let opts = BasisOptions { size: 120, ..Default::default() };
        let s = spectrum(&spec(3.0), &opts).unwrap();
        assert!((s.energies()[0] - 1.1563).abs() < 2e-3, "{:?}", s.energies());
        assert_eq!(s.raw.len(), 120);
    }

    #[test]
    fn invalid_options() {
        let bad = BasisOptions { size: 4, ..Default::default() };
        assert!(spectrum(&spec(3.0), &bad).is_err());
        let bad = BasisOptions { growth_factor: 1.0, ..Default::default() };
        assert!(spectrum(&spec(3.0), &bad).is_err());
    }

    #[test]
    fn matrix_text_format() {
        let s = format_matrix(&build_position_matrix(2).unwrap());
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].split(' ').count(), 2);
        assert!(lines[0].starts_with("0e0,0e0 "));
    }
}
