//! Parametric studies over the exponent: multi-method level tables, isolated
//! point detection, null-spectrum checks and comparison with the reference
//! table.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::hobasis::{self, BasisOptions};
use crate::potential::{minimal_pair, select_maximal_pair, EXPONENT_RANGE};
use crate::reference::{reference_table, REFERENCE_EXPONENTS};
use crate::semiclassical::{energy_bb, energy_mxtp};
use crate::shooting::{find_eigenvalues_with, DPolicy, ScanExecutor, Sequential, ShootingOptions};
use crate::toymodels::{toy_numeric, ToyModel};
use crate::{Error, PotentialSpec, Result};

/// `M0`: minimal-pair WKB, `M1`: maximal-pair WKB, `M2`: shooting, `M3`: oscillator basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Method {
    M0,
    M1,
    M2,
    M3,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::M0, Method::M1, Method::M2, Method::M3];

    pub fn tag(self) -> &'static str {
        match self {
            Method::M0 => "M0",
            Method::M1 => "M1",
            Method::M2 => "M2",
            Method::M3 => "M3",
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        match tag.trim() {
            "M0" | "m0" => Ok(Method::M0),
            "M1" | "m1" => Ok(Method::M1),
            "M2" | "m2" => Ok(Method::M2),
            "M3" | "m3" => Ok(Method::M3),
            other => Err(Error::Parse(format!("unknown method {other:?}"))),
        }
    }
}

/// Inclusive grid `start, start + step, ..., stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        let (lo, hi) = EXPONENT_RANGE;
        if !(start >= lo && stop <= hi && start <= stop) {
            return Err(Error::domain(format!("grid {start}:{stop} must lie inside [{lo}, {hi}]")));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::domain("grid step must be positive"));
        }
        Ok(Self { start, stop, step })
    }

    /// A single point.
    pub fn point(n: f64) -> Result<Self> {
        Self::new(n, n, 1.0)
    }

    /// Points are `start + i * step`, rounded to 12 decimals so that sums of
    /// binary fractions land on the intended values.
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| {
                let x = self.start + i as f64 * self.step;
                ((x * 1e12).round() / 1e12).min(self.stop)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepRequest {
    pub methods: Vec<Method>,
    pub grid: Grid,
    pub levels: usize,
    /// `d` for M2; the scan ceiling always follows the requested levels.
    pub shooting_d: DPolicy,
    pub basis: BasisOptions,
}

impl SweepRequest {
    pub fn new(methods: Vec<Method>, grid: Grid) -> Self {
        Self {
            methods,
            grid,
            levels: 5,
            shooting_d: DPolicy::Auto,
            basis: BasisOptions::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.levels == 0 {
            return Err(Error::domain("levels must be at least 1"));
        }
        if self.methods.is_empty() {
            return Err(Error::domain("no methods requested"));
        }
        Grid::new(self.grid.start, self.grid.stop, self.grid.step)?;
        Ok(())
    }
}

/// One `(N, E)` cell; `value == None` is a gap.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepEntry {
    pub exponent: f64,
    pub value: Option<f64>,
    pub converged: bool,
    pub diagnostic: String,
}

impl SweepEntry {
    fn gap(exponent: f64, diagnostic: String) -> Self {
        Self { exponent, value: None, converged: false, diagnostic }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MethodSeries {
    pub method: Method,
    /// `levels[n][i]` is level `n` at the `i`-th grid point.
    pub levels: Vec<Vec<SweepEntry>>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepTable {
    pub grid: Vec<f64>,
    pub series: Vec<MethodSeries>,
}

impl SweepTable {
    pub fn series(&self, method: Method) -> Option<&MethodSeries> {
        self.series.iter().find(|s| s.method == method)
    }
}

/// Energies found by one method at one exponent, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub energies: Vec<f64>,
    pub diagnostic: String,
}

/// Runs independent work items; results must come back in index order.
pub trait GridExecutor {
    fn run(&self, count: usize, f: &(dyn Fn(usize) -> PointResult + Sync)) -> Vec<PointResult>;
}

impl GridExecutor for Sequential {
    fn run(&self, count: usize, f: &(dyn Fn(usize) -> PointResult + Sync)) -> Vec<PointResult> {
        (0..count).map(f).collect()
    }
}

/// Scan executor used inside M2 solves launched from a sweep.
pub trait SweepExecutor: GridExecutor + ScanExecutor + Sync {}

impl<T: GridExecutor + ScanExecutor + Sync> SweepExecutor for T {}

fn point_result(r: Result<(Vec<f64>, String)>) -> PointResult {
    match r {
        Ok((energies, diagnostic)) => PointResult { energies, diagnostic },
        Err(e) => PointResult { energies: Vec::new(), diagnostic: e.to_string() },
    }
}

/// The first `levels` energies of `method` at `exponent`.
pub fn evaluate_point(
    method: Method,
    exponent: f64,
    levels: usize,
    shooting_d: DPolicy,
    basis: &BasisOptions,
    scan: &dyn ScanExecutor,
) -> PointResult {
    point_result((|| match method {
        Method::M0 => Ok((
            (0..levels as u32).map(|n| energy_bb(exponent, n).map(|w| w.energy)).collect::<Result<_>>()?,
            String::new(),
        )),
        Method::M1 => Ok((
            (0..levels as u32).map(|n| energy_mxtp(exponent, n).map(|w| w.energy)).collect::<Result<_>>()?,
            String::new(),
        )),
        Method::M2 => {
            let spec = PotentialSpec::new(exponent)?;
            let opts = ShootingOptions { d_policy: shooting_d, ..ShootingOptions::for_levels(exponent, levels as u32)? };
            let r = find_eigenvalues_with(&spec, &opts, scan)?;
            let mut e = r.converged_energies();
            e.truncate(levels);
            Ok((e, r.diagnostics.join("; ")))
        }
        Method::M3 => {
            let spec = PotentialSpec::new(exponent)?;
            let mut e = hobasis::spectrum(&spec, basis)?.energies();
            e.truncate(levels);
            Ok((e, String::new()))
        }
    })())
}

/// Assigns `values` (ascending) to `levels` slots so that they follow the
/// previous known values `last`; a uniform index shift is chosen.
fn stitch(values: &[f64], last: &[Option<f64>]) -> Vec<Option<f64>> {
    let levels = last.len();
    let mut best: Option<(f64, isize)> = None;
    if values.len() < levels && last.iter().any(Option::is_some) {
        for shift in 0..=(levels - values.len()) as isize {
            let mut cost = 0.0;
            let mut matched = 0;
            for (j, &v) in values.iter().enumerate() {
                if let Some(p) = last[(j as isize + shift) as usize] {
                    cost += (v - p).abs();
                    matched += 1;
                }
            }
            let cost = if matched > 0 { cost / matched as f64 } else { f64::INFINITY };
            if best.map_or(true, |(c, _)| cost < c) {
                best = Some((cost, shift));
            }
        }
    }
    let shift = best.map_or(0, |(_, s)| s) as usize;
    let mut out = vec![None; levels];
    for (j, &v) in values.iter().enumerate().take(levels) {
        if j + shift < levels {
            out[j + shift] = Some(v);
        }
    }
    out
}

/// Evaluates every requested method at every grid point. Failures become gaps.
pub fn run_sweep(req: &SweepRequest) -> Result<SweepTable> {
    run_sweep_with(req, &Sequential)
}

pub fn run_sweep_with(req: &SweepRequest, exec: &dyn SweepExecutor) -> Result<SweepTable> {
    req.validate()?;
    let grid = req.grid.points();
    let mut series = Vec::with_capacity(req.methods.len());
    let mut methods = req.methods.clone();
    methods.sort();
    methods.dedup();
    for method in methods {
        let points = exec.run(grid.len(), &|i| {
            evaluate_point(method, grid[i], req.levels, req.shooting_d, &req.basis, exec)
        });
        let mut levels: Vec<Vec<SweepEntry>> = vec![Vec::with_capacity(grid.len()); req.levels];
        let mut last: Vec<Option<f64>> = vec![None; req.levels];
        for (&n, p) in grid.iter().zip(points) {
            let slots = stitch(&p.energies, &last);
            for (l, slot) in slots.into_iter().enumerate() {
                let entry = match slot {
                    Some(v) => {
                        last[l] = Some(v);
                        SweepEntry { exponent: n, value: Some(v), converged: true, diagnostic: p.diagnostic.clone() }
                    }
                    None => {
                        let why = if p.diagnostic.is_empty() {
                            String::from("no converged eigenvalue")
                        } else {
                            p.diagnostic.clone()
                        };
                        SweepEntry::gap(n, why)
                    }
                };
                levels[l].push(entry);
            }
        }
        series.push(MethodSeries { method, levels });
    }
    Ok(SweepTable { grid, series })
}

/// Maximum grid step accepted by [`detect_isolated_points`].
pub const MAX_DETECTION_STEP: f64 = 0.05;
const NOISE_WINDOW: usize = 10;
const JUMP_FACTOR: f64 = 5.0;

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 0 {
        0.5 * (v[m - 1] + v[m])
    } else {
        v[m]
    }
}

/// Exponents where some level's slope jumps by more than 5x the median slope
/// change over the preceding 10 points. Adjacent detections merge into one,
/// placed at the largest jump. Levels are scanned independently and merged.
pub fn detect_isolated_points(table: &SweepTable, method: Method) -> Result<Vec<f64>> {
    let levels = table
        .series(method)
        .ok_or_else(|| Error::domain(format!("method {} not in sweep", method.tag())))?
        .levels
        .len();
    let step = detection_step(&table.grid)?;
    let mut found: Vec<f64> = Vec::new();
    for level in 0..levels {
        for n in detect_in_level(table, method, level)? {
            if !found.iter().any(|&f| (f - n).abs() <= 1.5 * step) {
                found.push(n);
            }
        }
    }
    found.sort_by(f64::total_cmp);
    Ok(found)
}

/// [`detect_isolated_points`] restricted to one level.
pub fn detect_in_level(table: &SweepTable, method: Method, level: usize) -> Result<Vec<f64>> {
    let series = table
        .series(method)
        .ok_or_else(|| Error::domain(format!("method {} not in sweep", method.tag())))?;
    let entries = series
        .levels
        .get(level)
        .ok_or_else(|| Error::domain(format!("level {level} not in sweep")))?;
    detection_step(&table.grid)?;
    Ok(detect_in_series(&table.grid, entries))
}

fn detection_step(grid: &[f64]) -> Result<f64> {
    if grid.len() < NOISE_WINDOW + 3 {
        return Err(Error::domain("grid too short for isolated point detection"));
    }
    let step = grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    if step > MAX_DETECTION_STEP + 1e-12 {
        return Err(Error::domain(format!(
            "grid step {step} exceeds {MAX_DETECTION_STEP} for isolated point detection"
        )));
    }
    Ok(step)
}

fn detect_in_series(grid: &[f64], level: &[SweepEntry]) -> Vec<f64> {
    // slope change at interior point i, from the three-point second difference
    let jump: Vec<Option<f64>> = (1..grid.len() - 1)
        .map(|i| {
            let (a, b, c) = (level[i - 1].value?, level[i].value?, level[i + 1].value?);
            let (h0, h1) = (grid[i] - grid[i - 1], grid[i + 1] - grid[i]);
            Some(((c - b) / h1 - (b - a) / h0).abs())
        })
        .collect();
    let mut hits: Vec<(usize, f64)> = Vec::new();
    for k in NOISE_WINDOW..jump.len() {
        let Some(j) = jump[k] else { continue };
        let mut window: Vec<f64> = jump[k - NOISE_WINDOW..k].iter().flatten().copied().collect();
        if window.len() < NOISE_WINDOW / 2 {
            continue;
        }
        let noise = median(&mut window);
        if j > JUMP_FACTOR * noise && j > 1e-9 {
            hits.push((k + 1, j));
        }
    }
    let mut out = Vec::new();
    let mut i = 0;
    while i < hits.len() {
        let mut best = hits[i];
        let mut k = i + 1;
        while k < hits.len() && hits[k].0 == hits[k - 1].0 + 1 {
            if hits[k].1 > best.1 {
                best = hits[k];
            }
            k += 1;
        }
        out.push(grid[best.0]);
        i = k;
    }
    out
}

/// Converged-eigenvalue counts at one exponent.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NullEntry {
    pub exponent: f64,
    /// M2 roots present and converged at every `d`, within the `d` tolerance.
    pub shooting: Vec<f64>,
    /// Largest spread over `d` of any M2 root found at the largest `d`.
    pub shooting_spread: f64,
    /// M3 values real at every size and stable within the basis tolerance.
    pub basis: Vec<f64>,
    pub basis_spread: f64,
    /// Union of both lists (values within the tolerance merged).
    pub converged: Vec<f64>,
    pub diagnostics: Vec<String>,
}

impl NullEntry {
    pub fn count(&self) -> usize {
        self.converged.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NullSpectrumReport {
    pub n_star: f64,
    pub window: f64,
    /// At `n_star - window`, `n_star`, `n_star + window`.
    pub entries: Vec<NullEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NullSpectrumOptions {
    pub d_values: Vec<f64>,
    pub sizes: Vec<usize>,
    pub levels: usize,
    pub tolerance: f64,
}

impl Default for NullSpectrumOptions {
    fn default() -> Self {
        Self { d_values: vec![8.0, 10.0, 12.0], sizes: vec![200, 400, 800], levels: 5, tolerance: 1e-2 }
    }
}

fn nearest(values: &[f64], x: f64) -> Option<f64> {
    values.iter().copied().min_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs()))
}

/// Values of the last list that have a neighbour in every other list, and
/// the largest spread (infinite when some list has no neighbour).
fn consistent(lists: &[Vec<f64>], tol: f64) -> (Vec<f64>, f64) {
    let Some(anchor) = lists.last() else { return (Vec::new(), 0.0) };
    let mut keep = Vec::new();
    let mut worst: f64 = 0.0;
    for &e in anchor {
        let mut lo = e;
        let mut hi = e;
        for l in &lists[..lists.len() - 1] {
            match nearest(l, e) {
                Some(v) => {
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                None => {
                    lo = f64::NEG_INFINITY;
                    hi = f64::INFINITY;
                }
            }
        }
        let spread = hi - lo;
        worst = worst.max(spread);
        if spread <= tol {
            keep.push(e);
        }
    }
    (keep, worst)
}

fn null_entry(exponent: f64, opts: &NullSpectrumOptions, exec: &dyn SweepExecutor) -> Result<NullEntry> {
    let spec = PotentialSpec::new(exponent)?;
    let mut diagnostics = Vec::new();
    let base = ShootingOptions::for_levels(exponent, opts.levels as u32)?;
    let shots = exec.run(opts.d_values.len(), &|i| {
        let o = ShootingOptions { d_policy: DPolicy::Fixed(opts.d_values[i]), ..base };
        point_result(find_eigenvalues_with(&spec, &o, exec).map(|r| (r.converged_energies(), r.diagnostics.join("; "))))
    });
    let mut lists = Vec::new();
    for (d, p) in opts.d_values.iter().zip(&shots) {
        if !p.diagnostic.is_empty() {
            diagnostics.push(format!("M2 d={d}: {}", p.diagnostic));
        }
        lists.push(p.energies.clone());
    }
    let (shooting, shooting_spread) = consistent(&lists, opts.tolerance);

    let basis_opts = BasisOptions::default();
    let solves = exec.run(opts.sizes.len(), &|i| {
        point_result(hobasis::shift_inverted_spectrum(&spec, opts.sizes[i], basis_opts.shift).map(|s| {
            let real = s
                .energies
                .iter()
                .filter(|z| z.re.is_finite() && z.im.abs() <= basis_opts.imag_tol.max(realness_scale(opts.sizes[i], **z, basis_opts.shift, s.max_inverse)))
                .map(|z| z.re)
                .collect();
            (real, String::new())
        }))
    });
    let mut lists = Vec::new();
    for (size, p) in opts.sizes.iter().zip(&solves) {
        if !p.diagnostic.is_empty() {
            diagnostics.push(format!("M3 size={size}: {}", p.diagnostic));
        }
        let mut e = p.energies.clone();
        e.sort_by(f64::total_cmp);
        lists.push(e);
    }
    let (mut basis, basis_spread) = consistent(&lists, opts.tolerance);
    basis.sort_by(f64::total_cmp);
    let e_cap = ShootingOptions::for_levels(exponent, opts.levels as u32)?.scan_e_max;
    basis.retain(|&e| e <= e_cap);

    let mut converged = shooting.clone();
    for &e in &basis {
        if nearest(&converged, e).map_or(true, |v| (v - e).abs() > opts.tolerance) {
            converged.push(e);
        }
    }
    converged.sort_by(f64::total_cmp);
    Ok(NullEntry { exponent, shooting, shooting_spread, basis, basis_spread, converged, diagnostics })
}

fn realness_scale(size: usize, e: Complex64, shift: f64, max_inverse: f64) -> f64 {
    let d = (e - shift).norm();
    size as f64 * f64::EPSILON * max_inverse * d * d
}

/// Counts eigenvalues that survive changes of `d` (M2) or basis size (M3)
/// at `n_star` and `n_star -+ window`.
pub fn null_spectrum_report(n_star: f64, window: f64) -> Result<NullSpectrumReport> {
    null_spectrum_report_with(n_star, window, &NullSpectrumOptions::default(), &Sequential)
}

pub fn null_spectrum_report_with(
    n_star: f64,
    window: f64,
    opts: &NullSpectrumOptions,
    exec: &dyn SweepExecutor,
) -> Result<NullSpectrumReport> {
    if !(window > 0.0) {
        return Err(Error::domain("window must be positive"));
    }
    let mut entries = Vec::new();
    for n in [n_star - window, n_star, n_star + window] {
        entries.push(null_entry(n, opts, exec)?);
    }
    Ok(NullSpectrumReport { n_star, window, entries })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CompareRow {
    pub method: Method,
    pub level: usize,
    pub exponent: f64,
    pub reference: f64,
    pub computed: Option<f64>,
    pub deviation: Option<f64>,
    pub note: String,
}

/// Basis size used for a comparison at `exponent`.
pub fn compare_basis_size(exponent: f64) -> usize {
    if exponent >= 10.0 {
        800
    } else {
        400
    }
}

/// All three methods at the reference exponents, next to the reference values.
pub fn reference_compare(levels: usize) -> Result<Vec<CompareRow>> {
    reference_compare_with(levels, &Sequential)
}

pub fn reference_compare_with(levels: usize, exec: &dyn SweepExecutor) -> Result<Vec<CompareRow>> {
    let table = reference_table();
    let methods = [Method::M1, Method::M2, Method::M3];
    let jobs: Vec<(Method, f64)> = methods
        .iter()
        .flat_map(|&m| REFERENCE_EXPONENTS.iter().map(move |&n| (m, n)))
        .collect();
    let results = exec.run(jobs.len(), &|i| {
        let (m, n) = jobs[i];
        let basis = BasisOptions { size: compare_basis_size(n), ..BasisOptions::default() };
        evaluate_point(m, n, levels, DPolicy::Auto, &basis, exec)
    });
    let mut rows = Vec::new();
    for (&(method, exponent), r) in jobs.iter().zip(results) {
        for level in 0..levels {
            let Some(cell) = table.get(method, level, exponent) else { continue };
            let computed = r.energies.get(level).copied();
            let mut note = cell.note.clone();
            if computed.is_none() && !r.diagnostic.is_empty() {
                if !note.is_empty() {
                    note.push_str("; ");
                }
                note.push_str(&r.diagnostic);
            }
            rows.push(CompareRow {
                method,
                level,
                exponent,
                reference: cell.value,
                computed,
                deviation: computed.map(|c| (c - cell.value).abs()),
                note,
            });
        }
    }
    Ok(rows)
}

/// Turning points at `E = 1`: the right member of the minimal and maximal pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TurningPointRow {
    pub exponent: f64,
    pub mntp: Complex64,
    pub mxtp: Complex64,
}

pub fn turning_point_curves(grid: &Grid) -> Result<Vec<TurningPointRow>> {
    grid.points()
        .into_iter()
        .map(|n| {
            let spec = PotentialSpec::new(n)?;
            Ok(TurningPointRow {
                exponent: n,
                mntp: minimal_pair(&spec, 1.0)?.right,
                mxtp: select_maximal_pair(&spec, 1.0)?.right,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ToyCurveRow {
    pub model: ToyModel,
    pub lambda: f64,
    pub e1: Complex64,
    pub e2: Complex64,
}

/// Eigenvalue curves of all four toy models on `lambda = start, start + step, ..., stop`.
pub fn toy_curves(start: f64, stop: f64, step: f64) -> Result<Vec<ToyCurveRow>> {
    if !(step > 0.0 && stop >= start) {
        return Err(Error::domain("invalid lambda grid"));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    let mut rows = Vec::new();
    for model in ToyModel::ALL {
        for i in 0..count {
            let lambda = ((start + i as f64 * step) * 1e12).round() / 1e12;
            let (e1, e2) = toy_numeric(model, lambda)?;
            rows.push(ToyCurveRow { model, lambda, e1, e2 });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m1_table(start: f64, stop: f64, method: Method) -> SweepTable {
        let req = SweepRequest::new(vec![method], Grid::new(start, stop, 0.02).unwrap());
        run_sweep(&req).unwrap()
    }

    #[test]
    fn grid_points() {
        let g = Grid::new(2.0, 12.0, 0.5).unwrap().points();
        assert_eq!(g.len(), 21);
        assert_eq!(g[4], 4.0);
        assert_eq!(*g.last().unwrap(), 12.0);
        let g = Grid::new(2.0, 12.0, 0.02).unwrap().points();
        assert_eq!(g.len(), 501);
        assert_eq!(g[100], 4.0);
        assert_eq!(g[300], 8.0);
        assert!(Grid::new(1.0, 3.0, 0.1).is_err());
        assert!(Grid::new(3.0, 4.0, 0.0).is_err());
        assert_eq!(Grid::point(6.0).unwrap().points(), vec![6.0]);
    }

    #[test]
    fn m1_sweep_matches_direct_evaluation() {
        let t = m1_table(2.0, 12.0, Method::M1);
        let s = t.series(Method::M1).unwrap();
        for (n, level) in s.levels.iter().enumerate() {
            for e in level {
                assert_eq!(e.value, Some(energy_mxtp(e.exponent, n as u32).unwrap().energy));
            }
        }
    }

    #[test]
    fn m0_and_m1_coincide_below_four() {
        let req = SweepRequest::new(vec![Method::M1, Method::M0], Grid::new(2.0, 12.0, 0.5).unwrap());
        let t = run_sweep(&req).unwrap();
        let (a, b) = (t.series(Method::M0).unwrap(), t.series(Method::M1).unwrap());
        for n in 0..5 {
            for (x, y) in a.levels[n].iter().zip(&b.levels[n]) {
                if x.exponent <= 4.0 {
                    let (x, y) = (x.value.unwrap(), y.value.unwrap());
                    assert!((x - y).abs() <= 1e-12 * x);
                }
            }
        }
    }

    #[test]
    fn isolated_points_of_m1() {
        let t = m1_table(2.0, 12.0, Method::M1);
        let found = detect_isolated_points(&t, Method::M1).unwrap();
        assert_eq!(found, vec![4.0, 8.0]);
        for n in 0..5 {
            let found = detect_in_level(&t, Method::M1, n).unwrap();
            assert_eq!(found, vec![4.0, 8.0], "level {n}");
        }
    }

    #[test]
    fn no_isolated_points_for_m0_or_inside_five_to_seven() {
        let t = m1_table(2.0, 12.0, Method::M0);
        assert!(detect_isolated_points(&t, Method::M0).unwrap().is_empty());
        let t = m1_table(5.0, 7.0, Method::M1);
        assert!(detect_isolated_points(&t, Method::M1).unwrap().is_empty());
    }

    #[test]
    fn detection_rejects_coarse_grids() {
        let req = SweepRequest::new(vec![Method::M1], Grid::new(2.0, 12.0, 0.1).unwrap());
        let t = run_sweep(&req).unwrap();
        assert!(detect_isolated_points(&t, Method::M1).is_err());
        assert!(detect_isolated_points(&t, Method::M2).is_err());
    }

    #[test]
    fn stitching_follows_previous_values() {
        let last = [Some(1.0), Some(4.0), Some(9.0)];
        assert_eq!(stitch(&[4.1, 9.2], &last), vec![None, Some(4.1), Some(9.2)]);
        assert_eq!(stitch(&[1.1, 4.1], &last), vec![Some(1.1), Some(4.1), None]);
        assert_eq!(stitch(&[1.0, 2.0, 3.0, 4.0], &[None, None]), vec![Some(1.0), Some(2.0)]);
    }

    #[test]
    fn single_point_m2_sweep() {
        let req = SweepRequest::new(vec![Method::M2], Grid::point(6.0).unwrap());
        let t = run_sweep(&req).unwrap();
        let s = t.series(Method::M2).unwrap();
        let want = [1.1448, 4.3386, 9.0731, 14.9352, 21.7142];
        for (n, w) in want.iter().enumerate() {
            assert!((s.levels[n][0].value.unwrap() - w).abs() < 1e-2);
        }
    }

    #[test]
    fn consistency_filter() {
        let lists = vec![vec![1.0, 2.0], vec![1.001, 3.0], vec![1.002, 2.5]];
        let (keep, spread) = consistent(&lists, 1e-2);
        assert_eq!(keep, vec![1.002]);
        assert!(spread > 0.4);
        let (keep, spread) = consistent(&[vec![], vec![1.0]], 1e-2);
        assert!(keep.is_empty() && spread.is_infinite());
    }

    #[test]
    fn figure_rows() {
        let rows = turning_point_curves(&Grid::new(2.0, 4.0, 0.5).unwrap()).unwrap();
        for r in rows {
            if r.exponent < 4.0 {
                assert!((r.mntp - r.mxtp).norm() < 1e-12);
            } else {
                // tie at N = 4 goes to the mirror-image pair
                assert!((r.mntp.re - r.mxtp.re).abs() < 1e-12);
                assert!((r.mntp.im.abs() - r.mxtp.im.abs()).abs() < 1e-12);
            }
        }
        let r6 = turning_point_curves(&Grid::point(6.0).unwrap()).unwrap();
        assert!(r6[0].mxtp.im.abs() < 1e-12);
        let toy = toy_curves(-3.0, 5.0, 0.1).unwrap();
        assert_eq!(toy.len(), 4 * 81);
    }

    #[test]
    fn method_tags() {
        for m in Method::ALL {
            assert_eq!(Method::from_tag(m.tag()).unwrap(), m);
        }
        assert!(Method::from_tag("M4").is_err());
    }
}
