//! One function per subcommand, each producing a [`Table`].

use std::fs;
use std::path::Path;

use ptdirichlet_core::hobasis::{self, BasisOptions};
use ptdirichlet_core::potential::{minimal_pair, select_maximal_pair, turning_points};
use ptdirichlet_core::semiclassical::{energy_bb, energy_hermitian, energy_mxtp, invert_action};
use ptdirichlet_core::shooting::{find_eigenvalues_with, DPolicy, ShootingOptions};
use ptdirichlet_core::sweep::{
    detect_isolated_points, run_sweep_with, reference_compare_with, toy_curves, turning_point_curves, Grid, SweepRequest,
    SweepTable,
};
use ptdirichlet_core::toymodels::{classify_point, hft_residual, PointKind, ToyModel};
use ptdirichlet_core::{Error, PotentialSpec};

use crate::args::*;
use crate::exec::Rayon;
use crate::output::{render_csv, render_json, Cell, Table};
use crate::CliError;

/// A finished table plus an optional non-convergence reason (exit code 3).
#[derive(Debug)]
pub struct Outcome {
    pub table: Table,
    pub nonconverged: Option<String>,
}

impl Outcome {
    fn ok(table: Table) -> Self {
        Self { table, nonconverged: None }
    }
}

pub fn cwkb(a: &CwkbArgs) -> Result<Outcome, CliError> {
    PotentialSpec::new(a.exponent)?;
    let mut t = Table::new(&["n", "N", "energy", "method"]);
    for n in 0..a.levels {
        let w = match a.method {
            WkbChoice::Bb => energy_bb(a.exponent, n)?,
            WkbChoice::Mxtp => energy_mxtp(a.exponent, n)?,
            WkbChoice::Hermitian => energy_hermitian(a.exponent, n)?,
            WkbChoice::Action => invert_action(a.exponent, n)?,
        };
        t.push(vec![n.into(), a.exponent.into(), w.energy.into(), format!("{:?}", w.method).into()]);
    }
    Ok(Outcome::ok(t))
}

pub fn shoot(a: &ShootArgs) -> Result<Outcome, CliError> {
    let spec = PotentialSpec::new(a.exponent)?;
    let mut opts = ShootingOptions::for_levels(a.exponent, a.levels.max(1))?;
    if let Some(e) = a.emax {
        opts.scan_e_max = e;
    }
    if let Some(e) = a.emin {
        opts.scan_e_min = e;
    }
    if let Some(d) = a.d {
        opts.d_policy = DPolicy::Fixed(d);
    }
    if let Some(s) = a.step {
        opts.scan_step = Some(s);
        opts.min_scan_step = opts.min_scan_step.min(s);
    }
    opts.root_tol = a.root_tol;
    let r = find_eigenvalues_with(&spec, &opts, &Rayon)?;
    for d in &r.diagnostics {
        log::warn!("{d}");
    }
    if let Some(path) = &a.trace {
        let mut t = Table::new(&["E", "F", "im_residual"]);
        for s in &r.trace.samples {
            t.push(vec![s.energy.into(), s.f.into(), s.im_residual.into()]);
        }
        write_file(path, &render_csv(&t))?;
    }
    let mut roots = r.eigenvalues.clone();
    if a.emax.is_none() {
        roots.truncate(a.levels as usize);
    }
    let mut t = Table::new(&["n", "N", "energy", "d", "energy_grown_d", "d_shift_change", "converged"]);
    for e in &roots {
        t.push(vec![
            e.n.into(),
            a.exponent.into(),
            e.energy.into(),
            e.d_used.into(),
            e.energy_grown_d.into(),
            e.d_shift_change.into(),
            e.converged.into(),
        ]);
    }
    let bad = roots.iter().filter(|e| !e.converged).count();
    let nonconverged = if bad > 0 {
        Some(format!("{bad} eigenvalue(s) not stable under d -> {}d", opts.d_growth))
    } else if a.emax.is_none() && roots.len() < a.levels as usize {
        Some(format!("found {} of {} requested levels", roots.len(), a.levels))
    } else {
        None
    };
    Ok(Outcome { table: t, nonconverged })
}

pub fn diag(a: &DiagArgs) -> Result<Outcome, CliError> {
    let spec = PotentialSpec::new(a.exponent)?;
    let size = if a.full_scale { BasisOptions::full_scale().size } else { a.size };
    let opts = BasisOptions {
        size,
        growth_factor: a.growth,
        imag_tol: a.imag_tol,
        stability_tol: a.stability_tol,
        shift: a.shift,
    };
    opts.validate()?;
    if let Some(path) = &a.dump {
        write_file(path, &hobasis::format_matrix(&hobasis::build_hamiltonian(&spec, size)?))?;
    }
    let (p, g) = rayon::join(
        || hobasis::shift_inverted_spectrum(&spec, size, opts.shift),
        || hobasis::shift_inverted_spectrum(&spec, opts.grown_size(), opts.shift),
    );
    let s = hobasis::assemble(&spec, &opts, p?, g?);
    if a.raw {
        let mut t = Table::new(&["index", "re", "im"]);
        for (i, z) in s.raw.iter().enumerate() {
            t.push(vec![i.into(), z.re.into(), z.im.into()]);
        }
        return Ok(Outcome::ok(t));
    }
    let mut t = Table::new(&["n", "N", "energy", "stability", "imag"]);
    for l in s.accepted.iter().take(a.levels) {
        t.push(vec![l.n.into(), a.exponent.into(), l.energy.into(), l.stability.into(), l.imag.into()]);
    }
    let nonconverged = (s.accepted.len() < a.levels)
        .then(|| format!("{} of {} levels real and stable at sizes {}/{}", s.accepted.len(), a.levels, size, s.grown_size));
    Ok(Outcome { table: t, nonconverged })
}

pub fn sweep_table(t: &SweepTable) -> Table {
    let mut out = Table::new(&["method", "level", "N", "energy", "converged", "diagnostic"]);
    for s in &t.series {
        for (n, level) in s.levels.iter().enumerate() {
            for e in level {
                let value = e.value.map_or_else(|| Cell::Text("GAP".into()), Cell::Float);
                out.push(vec![
                    s.method.tag().into(),
                    n.into(),
                    e.exponent.into(),
                    value,
                    e.converged.into(),
                    e.diagnostic.clone().into(),
                ]);
            }
        }
    }
    out
}

pub fn sweep(a: &SweepArgs) -> Result<Outcome, CliError> {
    let grid = Grid::new(a.start, a.stop, a.step)?;
    let req = SweepRequest {
        methods: a.methods.clone(),
        grid,
        levels: a.levels,
        shooting_d: a.d.map_or(DPolicy::Auto, DPolicy::Fixed),
        basis: BasisOptions { size: a.size, ..BasisOptions::default() },
    };
    let table = run_sweep_with(&req, &Rayon)?;
    if a.detect_ips {
        let mut t = Table::new(&["method", "N_star"]);
        for s in &table.series {
            for n in detect_isolated_points(&table, s.method)? {
                t.push(vec![s.method.tag().into(), n.into()]);
            }
        }
        return Ok(Outcome::ok(t));
    }
    Ok(Outcome::ok(sweep_table(&table)))
}

pub fn turning(a: &TurningPointsArgs) -> Result<Outcome, CliError> {
    let spec = PotentialSpec::new(a.exponent)?;
    let set = turning_points(&spec, a.energy)?;
    let min = minimal_pair(&spec, a.energy)?;
    let max = select_maximal_pair(&spec, a.energy)?;
    let role = |z| {
        let mut r = Vec::new();
        if z == min.left || z == min.right {
            r.push("min");
        }
        if z == max.left || z == max.right {
            r.push("max");
        }
        r.join("+")
    };
    let mut t = Table::new(&["k", "re", "im", "residual", "accepted", "pair"]);
    for (p, ok) in set.accepted.iter().map(|p| (p, true)).chain(set.rejected.iter().map(|p| (p, false))) {
        t.push(vec![p.k.into(), p.x.re.into(), p.x.im.into(), p.residual.into(), ok.into(), role(p.x).into()]);
    }
    Ok(Outcome::ok(t))
}

fn models(tag: &str) -> Result<Vec<ToyModel>, CliError> {
    if tag.eq_ignore_ascii_case("all") {
        Ok(ToyModel::ALL.to_vec())
    } else {
        Ok(vec![ToyModel::from_tag(tag)?])
    }
}

pub fn toy(a: &ToyArgs) -> Result<Outcome, CliError> {
    let models = models(&a.model)?;
    if let Some(l) = a.hft {
        let mut t = Table::new(&["lambda", "residual"]);
        t.push(vec![l.into(), hft_residual(l, a.h)?.into()]);
        return Ok(Outcome::ok(t));
    }
    if let Some(l) = a.classify {
        let mut t = Table::new(&["model", "lambda_star", "kind", "left_slope", "right_slope", "complex_side"]);
        for m in models {
            let c = classify_point(m, l, a.h)?;
            let kind = match c.kind {
                PointKind::Ep => "EP",
                PointKind::Ip => "IP",
                PointKind::Analytic => "ANALYTIC",
            };
            t.push(vec![
                m.tag().to_string().into(),
                l.into(),
                kind.into(),
                c.left_slope.into(),
                c.right_slope.into(),
                c.complex_side.into(),
            ]);
        }
        return Ok(Outcome::ok(t));
    }
    let mut t = Table::new(&["model", "lambda", "e1_re", "e1_im", "e2_re", "e2_im"]);
    for r in toy_curves(a.start, a.stop, a.step)?.into_iter().filter(|r| models.contains(&r.model)) {
        t.push(vec![
            r.model.tag().to_string().into(),
            r.lambda.into(),
            r.e1.re.into(),
            r.e1.im.into(),
            r.e2.re.into(),
            r.e2.im.into(),
        ]);
    }
    Ok(Outcome::ok(t))
}

pub fn compare(a: &CompareArgs) -> Result<Outcome, CliError> {
    if a.levels == 0 || a.levels > 5 {
        return Err(CliError::Usage("--levels must be between 1 and 5".into()));
    }
    let rows = reference_compare_with(a.levels, &Rayon)?;
    let mut t = Table::new(&["method", "level", "N", "reference", "computed", "deviation", "note"]);
    for r in rows {
        t.push(vec![
            r.method.tag().into(),
            r.level.into(),
            r.exponent.into(),
            r.reference.into(),
            r.computed.into(),
            r.deviation.into(),
            r.note.into(),
        ]);
    }
    Ok(Outcome::ok(t))
}

pub fn figures(a: &FiguresArgs) -> Result<Outcome, CliError> {
    fs::create_dir_all(&a.out_dir).map_err(|e| CliError::Internal(format!("{}: {e}", a.out_dir.display())))?;

    let mut fig1 = Table::new(&["N", "mntp_re", "mntp_im", "mxtp_re", "mxtp_im"]);
    for r in turning_point_curves(&Grid::new(2.0, 12.0, 0.05)?)? {
        fig1.push(vec![r.exponent.into(), r.mntp.re.into(), r.mntp.im.into(), r.mxtp.re.into(), r.mxtp.im.into()]);
    }

    let req = SweepRequest::new(a.methods.clone(), Grid::new(2.0, 12.0, a.step)?);
    let fig2 = sweep_table(&run_sweep_with(&req, &Rayon)?);

    let mut fig3 = Table::new(&["model", "lambda", "e1_re", "e1_im", "e2_re", "e2_im"]);
    for r in toy_curves(-3.0, 5.0, 0.02)? {
        fig3.push(vec![
            r.model.tag().to_string().into(),
            r.lambda.into(),
            r.e1.re.into(),
            r.e1.im.into(),
            r.e2.re.into(),
            r.e2.im.into(),
        ]);
    }

    let mut listing = Table::new(&["file", "rows"]);
    for (name, t) in [("fig1", &fig1), ("fig2", &fig2), ("fig3", &fig3)] {
        let csv = a.out_dir.join(format!("{name}.csv"));
        write_file(&csv, &render_csv(t))?;
        listing.push(vec![csv.display().to_string().into(), t.rows.len().into()]);
        if a.json {
            let json = a.out_dir.join(format!("{name}.json"));
            write_file(&json, &render_json(t))?;
            listing.push(vec![json.display().to_string().into(), t.rows.len().into()]);
        }
    }
    Ok(Outcome::ok(listing))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))
}

/// Subcommands whose output depends only on their options (and so may be cached).
pub fn cacheable(c: &Command) -> bool {
    match c {
        Command::Shoot(a) => a.trace.is_none(),
        Command::Diag(a) => a.dump.is_none(),
        Command::Figures(_) => false,
        _ => true,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Parse(_) => CliError::Usage(e.to_string()),
            Error::EigenNotConverged { .. }
            | Error::QuadratureNotConverged { .. }
            | Error::RootNotConverged { .. }
            | Error::StepUnderflow { .. }
            | Error::TooManySteps { .. }
            | Error::Shooting { .. }
            | Error::Bracket(_)
            | Error::InvalidBracket { .. }
            | Error::NotANumber { .. }
            | Error::Singular { .. } => CliError::Numerical(e.to_string()),
        }
    }
}
