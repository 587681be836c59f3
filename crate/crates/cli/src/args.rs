use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ptdirichlet_core::sweep::Method;

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "ptdirichlet", version, about = "Real Dirichlet spectra of V(x) = -(ix)^N, 2 <= N < 12")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    /// Write results here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Cache directory (default: $PTDIRICHLET_CACHE_DIR, then the user cache directory).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Worker threads; PTDIRICHLET_THREADS overrides. 0 or unset uses all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form WKB energies.
    Cwkb(CwkbArgs),
    /// Real-line shooting with psi(-d) = psi(d) = 0.
    Shoot(ShootArgs),
    /// Truncated oscillator-basis diagonalization.
    Diag(DiagArgs),
    /// Levels over a grid of exponents.
    Sweep(SweepArgs),
    /// Complex turning points at (N, E).
    TurningPoints(TurningPointsArgs),
    /// The 2x2 toy families.
    Toy(ToyArgs),
    /// All methods against the reference table.
    Compare(CompareArgs),
    /// Data files for the three figures.
    Figures(FiguresArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WkbChoice {
    Bb,
    Mxtp,
    Hermitian,
    Action,
}

#[derive(Debug, Args)]
pub struct CwkbArgs {
    #[arg(long = "N")]
    pub exponent: f64,
    #[arg(long, default_value_t = 5)]
    pub levels: u32,
    #[arg(long, value_enum, default_value_t = WkbChoice::Mxtp)]
    pub method: WkbChoice,
}

#[derive(Debug, Args)]
pub struct ShootArgs {
    #[arg(long = "N")]
    pub exponent: f64,
    /// Levels to report; ignored when --emax is given.
    #[arg(long, default_value_t = 5)]
    pub levels: u32,
    /// Scan ceiling; all roots below it are reported.
    #[arg(long)]
    pub emax: Option<f64>,
    #[arg(long)]
    pub emin: Option<f64>,
    /// Box half-width; automatic when omitted.
    #[arg(long)]
    pub d: Option<f64>,
    /// Fixed scan step.
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long, default_value_t = 1e-6)]
    pub root_tol: f64,
    /// Write the miss-function samples (E, F, im_residual) as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiagArgs {
    #[arg(long = "N")]
    pub exponent: f64,
    #[arg(long, default_value_t = 400)]
    pub size: usize,
    /// Use the 1500-state profile.
    #[arg(long, conflicts_with = "size")]
    pub full_scale: bool,
    #[arg(long, default_value_t = 1.25)]
    pub growth: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub imag_tol: f64,
    #[arg(long, default_value_t = 1e-2)]
    pub stability_tol: f64,
    #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
    pub shift: f64,
    /// Accepted levels to report; fewer is a non-convergence.
    #[arg(long, default_value_t = 5)]
    pub levels: usize,
    /// Report every raw eigenvalue instead of the accepted levels.
    #[arg(long)]
    pub raw: bool,
    /// Write H in text form ("re,im" pairs, row-major).
    #[arg(long)]
    pub dump: Option<PathBuf>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    Method::from_tag(s).map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',', value_parser = parse_method, default_value = "M1")]
    pub methods: Vec<Method>,
    #[arg(long, default_value_t = 2.0)]
    pub start: f64,
    #[arg(long, default_value_t = 12.0)]
    pub stop: f64,
    #[arg(long, default_value_t = 0.5)]
    pub step: f64,
    #[arg(long, default_value_t = 5)]
    pub levels: usize,
    /// Fixed d for M2.
    #[arg(long)]
    pub d: Option<f64>,
    /// Basis size for M3.
    #[arg(long, default_value_t = 400)]
    pub size: usize,
    /// Report detected isolated points instead of the table.
    #[arg(long)]
    pub detect_ips: bool,
}

#[derive(Debug, Args)]
pub struct TurningPointsArgs {
    #[arg(long = "N")]
    pub exponent: f64,
    #[arg(long = "E", default_value_t = 1.0)]
    pub energy: f64,
}

#[derive(Debug, Args)]
pub struct ToyArgs {
    /// A, B, C, D or all.
    #[arg(long, default_value = "all")]
    pub model: String,
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    pub start: f64,
    #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
    pub stop: f64,
    #[arg(long, default_value_t = 0.1)]
    pub step: f64,
    /// Classify this parameter value instead of emitting curves.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "hft")]
    pub classify: Option<f64>,
    /// Hellmann-Feynman residual of model B at this parameter value.
    #[arg(long, allow_hyphen_values = true)]
    pub hft: Option<f64>,
    #[arg(long, default_value_t = 1e-4)]
    pub h: f64,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, default_value_t = 5)]
    pub levels: usize,
}

#[derive(Debug, Args)]
pub struct FiguresArgs {
    #[arg(long, default_value = "figures")]
    pub out_dir: PathBuf,
    /// Also write a JSON mirror of every CSV.
    #[arg(long)]
    pub json: bool,
    #[arg(long, value_delimiter = ',', value_parser = parse_method, default_value = "M0,M1")]
    pub methods: Vec<Method>,
    /// Grid step of the level sweep.
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
}
