//! Real-line shooting: integrate `psi'' + [E + (ix)^N] psi = 0` from the
//! origin to `+-d` and locate the zeros of the Dirichlet determinant
//! `u(d) v(-d) - u(-d) v(d)`.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::numerics::{propagate_system, refine_root, OdeOptions, OdeState};
use crate::potential::PotentialSpec;
use crate::semiclassical::energy_mxtp;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DPolicy {
    Fixed(f64),
    /// [`choose_d`] applied to the scan ceiling.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ShootingOptions {
    pub d_policy: DPolicy,
    pub scan_e_min: f64,
    pub scan_e_max: f64,
    /// Fixed scan step; `None` uses half the local WKB level spacing.
    pub scan_step: Option<f64>,
    pub min_scan_step: f64,
    pub root_tol: f64,
    pub d_convergence_tol: f64,
    /// Factor applied to `d` for the convergence re-solve.
    pub d_growth: f64,
    /// `|N - 4|` or `|N - 8|` below this marks results as suspect.
    pub ip_window: f64,
    pub ode: OdeOptions,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self {
            d_policy: DPolicy::Auto,
            scan_e_min: 0.05,
            scan_e_max: 20.0,
            scan_step: None,
            min_scan_step: 0.05,
            root_tol: 1e-6,
            d_convergence_tol: 1e-2,
            d_growth: 1.2,
            ip_window: 0.15,
            ode: OdeOptions::default(),
        }
    }
}

impl ShootingOptions {
    /// Options whose scan ceiling covers the first `levels` WKB levels with margin.
    pub fn for_levels(exponent: f64, levels: u32) -> Result<Self> {
        let top = energy_mxtp(exponent, levels.max(1) - 1)?.energy;
        Ok(Self {
            scan_e_max: 1.25 * top + 1.0,
            ..Self::default()
        })
    }

    fn validate(&self) -> Result<()> {
        let positive = [
            self.scan_e_max,
            self.root_tol,
            self.d_convergence_tol,
            self.min_scan_step,
        ];
        if positive.iter().any(|v| !(*v > 0.0)) || !(self.scan_e_min >= 0.0) {
            return Err(Error::domain("shooting tolerances and scan limits must be positive"));
        }
        if !(self.scan_e_max > self.scan_e_min) {
            return Err(Error::domain("scan_e_max must exceed scan_e_min"));
        }
        if !(self.d_growth > 1.0) {
            return Err(Error::domain("d_growth must exceed 1"));
        }
        if let Some(step) = self.scan_step {
            if !(step > 0.0) {
                return Err(Error::domain("scan step must be positive"));
            }
        }
        if let DPolicy::Fixed(d) = self.d_policy {
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::domain("d must be positive"));
            }
        }
        Ok(())
    }

    pub fn d_for(&self, spec: &PotentialSpec) -> f64 {
        match self.d_policy {
            DPolicy::Fixed(d) => d,
            DPolicy::Auto => choose_d(spec, self.scan_e_max),
        }
    }
}

/// The solutions `u` (`u(0)=1, u'(0)=0`) and `v` (`v(0)=0, v'(0)=1`)
/// integrated together to `+d` or `-d`; both share one log scale.
pub fn fundamental_pair(
    spec: &PotentialSpec,
    energy: f64,
    d: f64,
    side: Side,
    ode: &OdeOptions,
) -> Result<(OdeState, OdeState)> {
    if !(d > 0.0) {
        return Err(Error::domain("d must be positive"));
    }
    let end = match side {
        Side::Left => -d,
        Side::Right => d,
    };
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    propagate_system(
        |x| spec.q(energy, x),
        0.0,
        end,
        [(one, zero), (zero, one)],
        ode,
    )
    .map(|[u, v]| (u, v))
    .map_err(|e| Error::Shooting {
        exponent: spec.exponent(),
        energy,
        side: side.name(),
        source: Box::new(e),
    })
}

/// One evaluation of the normalized determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MissSample {
    pub energy: f64,
    /// Real part of the normalized determinant.
    pub f: f64,
    /// `|Im D| / (|D| + eps)` of the normalized determinant.
    pub im_residual: f64,
}

fn both_sides(spec: &PotentialSpec, energy: f64, d: f64, ode: &OdeOptions) -> Result<[(OdeState, OdeState); 2]> {
    Ok([
        fundamental_pair(spec, energy, d, Side::Right, ode)?,
        fundamental_pair(spec, energy, d, Side::Left, ode)?,
    ])
}

/// `D = u(d) v(-d) - u(-d) v(d)` divided by `max(|u(d) v(-d)|, |u(-d) v(d)|)`.
///
/// The per-side scale factors are positive and common to both terms, so they
/// drop out of the normalized value.
pub fn miss_function(spec: &PotentialSpec, energy: f64, d: f64, ode: &OdeOptions) -> Result<MissSample> {
    let [(ur, vr), (ul, vl)] = both_sides(spec, energy, d, ode)?;
    let a = ur.y * vl.y;
    let b = ul.y * vr.y;
    let scale = a.norm().max(b.norm());
    let dn = if scale > 0.0 { (a - b) / scale } else { Complex64::new(0.0, 0.0) };
    Ok(MissSample {
        energy,
        f: dn.re,
        im_residual: dn.im.abs() / (dn.norm() + f64::EPSILON),
    })
}

/// The ratio form `Re[u(d)/v(d) - u(-d)/v(-d)]`; shares its zeros with the
/// determinant but has poles where `v(+-d) = 0`.
pub fn miss_function_ratio(spec: &PotentialSpec, energy: f64, d: f64, ode: &OdeOptions) -> Result<f64> {
    let [(ur, vr), (ul, vl)] = both_sides(spec, energy, d, ode)?;
    Ok((ur.y / vr.y - ul.y / vl.y).re)
}

/// `max(3 E_max^(1/N), 6)`, capped at 10.
pub fn choose_d(spec: &PotentialSpec, e_max: f64) -> f64 {
    (3.0 * e_max.max(0.0).powf(1.0 / spec.exponent())).max(6.0).min(10.0)
}

/// Scan energies from `scan_e_min` to `scan_e_max`, with spacing at most half
/// the local WKB level spacing (never below `min_scan_step`).
pub fn scan_grid(spec: &PotentialSpec, opts: &ShootingOptions) -> Result<Vec<f64>> {
    opts.validate()?;
    let n = spec.exponent();
    let mut grid = Vec::new();
    let mut e = opts.scan_e_min;
    let mut level = 0u32;
    let mut levels = (energy_mxtp(n, 0)?.energy, energy_mxtp(n, 1)?.energy);
    while e < opts.scan_e_max {
        grid.push(e);
        let step = match opts.scan_step {
            Some(s) => s,
            None => {
                while e >= levels.1 {
                    level += 1;
                    levels = (levels.1, energy_mxtp(n, level + 1)?.energy);
                }
                0.5 * (levels.1 - levels.0)
            }
        };
        e += step.max(opts.min_scan_step);
    }
    grid.push(opts.scan_e_max);
    Ok(grid)
}

/// Evaluates the miss function over a list of energies.
///
/// The default is sequential; callers may supply a parallel executor. The
/// result order must match the input order.
pub trait ScanExecutor {
    fn map(
        &self,
        energies: &[f64],
        f: &(dyn Fn(f64) -> Result<MissSample> + Sync),
    ) -> Vec<Result<MissSample>>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl ScanExecutor for Sequential {
    fn map(
        &self,
        energies: &[f64],
        f: &(dyn Fn(f64) -> Result<MissSample> + Sync),
    ) -> Vec<Result<MissSample>> {
        energies.iter().map(|&e| f(e)).collect()
    }
}

/// Samples of the miss function along a real-energy scan.
#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MissFunctionTrace {
    pub samples: Vec<MissSample>,
}

impl MissFunctionTrace {
    pub fn max_im_residual(&self) -> f64 {
        self.samples.iter().map(|s| s.im_residual).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DirichletEigenvalue {
    pub n: usize,
    pub energy: f64,
    pub d_used: f64,
    /// The same root re-solved at the grown `d`, if one was found nearby.
    pub energy_grown_d: Option<f64>,
    /// `|E(d) - E(growth * d)|`, infinite when no nearby root was found.
    pub d_shift_change: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ShootingResult {
    pub exponent: f64,
    pub d: f64,
    pub eigenvalues: Vec<DirichletEigenvalue>,
    pub trace: MissFunctionTrace,
    /// Within the isolated-point window; values are unreliable.
    pub suspect: bool,
    pub diagnostics: Vec<String>,
}

impl ShootingResult {
    pub fn converged(&self) -> impl Iterator<Item = &DirichletEigenvalue> {
        self.eigenvalues.iter().filter(|e| e.converged)
    }

    pub fn converged_energies(&self) -> Vec<f64> {
        self.converged().map(|e| e.energy).collect()
    }
}

/// Scans, brackets, refines and d-certifies real Dirichlet eigenvalues.
pub fn find_eigenvalues(spec: &PotentialSpec, opts: &ShootingOptions) -> Result<ShootingResult> {
    find_eigenvalues_with(spec, opts, &Sequential)
}

/// [`find_eigenvalues`] with a caller-supplied executor for the scan.
pub fn find_eigenvalues_with(
    spec: &PotentialSpec,
    opts: &ShootingOptions,
    exec: &dyn ScanExecutor,
) -> Result<ShootingResult> {
    opts.validate()?;
    let d = opts.d_for(spec);
    let grid = scan_grid(spec, opts)?;
    let mut diagnostics = Vec::new();
    let suspect = spec.ip_distance() < opts.ip_window;
    if suspect {
        diagnostics.push(format!(
            "N = {} lies within {} of an isolated point; results are unreliable",
            spec.exponent(),
            opts.ip_window
        ));
    }

    let ode = opts.ode;
    let eval = |e: f64| miss_function(spec, e, d, &ode);
    let results = exec.map(&grid, &eval);
    let mut samples: Vec<Option<MissSample>> = Vec::with_capacity(grid.len());
    for (e, r) in grid.iter().zip(results) {
        match r {
            Ok(s) => samples.push(Some(s)),
            Err(err) => {
                diagnostics.push(format!("scan point E = {e} failed: {err}"));
                samples.push(None);
            }
        }
    }
    let trace = MissFunctionTrace {
        samples: samples.iter().flatten().copied().collect(),
    };
    let worst = trace.max_im_residual();
    if worst > REALNESS_TOL {
        diagnostics.push(format!("miss function imaginary residual {worst:e} exceeds {REALNESS_TOL:e}"));
    }

    let mut roots = Vec::new();
    for w in samples.windows(2) {
        let (Some(a), Some(b)) = (w[0], w[1]) else { continue };
        if a.f == 0.0 {
            roots.push(a.energy);
            continue;
        }
        if a.f.signum() == b.f.signum() || b.f == 0.0 {
            continue;
        }
        match refine(spec, d, a.energy, b.energy, opts) {
            Ok(e) => roots.push(e),
            Err(err) => diagnostics.push(format!("refinement in [{}, {}] failed: {err}", a.energy, b.energy)),
        }
    }
    if let Some(Some(last)) = samples.last() {
        if last.f == 0.0 {
            roots.push(last.energy);
        }
    }
    if roots.is_empty() {
        diagnostics.push(String::from("no sign changes of the miss function in the scan range"));
    }

    let d_grown = opts.d_growth * d;
    let step_hint = opts.scan_step.unwrap_or(opts.min_scan_step).max(opts.min_scan_step);
    let mut eigenvalues = Vec::with_capacity(roots.len());
    for (n, &e) in roots.iter().enumerate() {
        let grown = match resolve_near(spec, d_grown, e, step_hint, opts) {
            Ok(g) => g,
            Err(err) => {
                diagnostics.push(format!("re-solve of E = {e} at d = {d_grown} failed: {err}"));
                None
            }
        };
        let shift = grown.map_or(f64::INFINITY, |g| (g - e).abs());
        eigenvalues.push(DirichletEigenvalue {
            n,
            energy: e,
            d_used: d,
            energy_grown_d: grown,
            d_shift_change: shift,
            converged: shift <= opts.d_convergence_tol,
        });
    }
    Ok(ShootingResult {
        exponent: spec.exponent(),
        d,
        eigenvalues,
        trace,
        suspect,
        diagnostics,
    })
}

/// Realness bound on the miss function's imaginary residual.
pub const REALNESS_TOL: f64 = 1e-6;

fn refine(spec: &PotentialSpec, d: f64, lo: f64, hi: f64, opts: &ShootingOptions) -> Result<f64> {
    let mut failure = None;
    let root = refine_root(
        |e| match miss_function(spec, e, d, &opts.ode) {
            Ok(s) => s.f,
            Err(err) => {
                failure.get_or_insert(err);
                f64::NAN
            }
        },
        lo,
        hi,
        opts.root_tol,
    );
    match failure {
        Some(err) => Err(err),
        None => root,
    }
}

/// Looks for a sign change of the miss function at `d` in widening windows
/// around `e` and refines it.
fn resolve_near(spec: &PotentialSpec, d: f64, e: f64, step: f64, opts: &ShootingOptions) -> Result<Option<f64>> {
    let tol = opts.d_convergence_tol;
    let f = |x: f64| miss_function(spec, x, d, &opts.ode).map(|s| s.f);
    let f0 = f(e)?;
    if f0 == 0.0 {
        return Ok(Some(e));
    }
    let mut best: Option<f64> = None;
    for w in [0.25 * tol, tol, 4.0 * tol, step, 4.0 * step] {
        let lo = (e - w).max(opts.scan_e_min.min(e));
        let hi = e + w;
        let (flo, fhi) = (f(lo)?, f(hi)?);
        // nearest sign change on either side
        let mut candidates = Vec::new();
        if flo.signum() != f0.signum() {
            candidates.push(refine(spec, d, lo, e, opts)?);
        }
        if fhi.signum() != f0.signum() {
            candidates.push(refine(spec, d, e, hi, opts)?);
        }
        if let Some(c) = candidates
            .into_iter()
            .min_by(|a, b| (a - e).abs().total_cmp(&(b - e).abs()))
        {
            best = Some(c);
            break;
        }
    }
    Ok(best)
}
