//! Command-line front end: argument parsing, caching, output formats and
//! thread-pool orchestration around `ptdirichlet-core`.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::PathBuf;

use clap::Parser;

pub mod args;
pub mod cache;
pub mod commands;
pub mod exec;
pub mod output;

use args::{Cli, Command};
use cache::Cache;
use commands::Outcome;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NONCONVERGED: i32 = 3;

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "PTDIRICHLET_CACHE_DIR";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numerical(_) => EXIT_NONCONVERGED,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }

    /// `error[kind]: message` on a single line.
    pub fn line(&self) -> String {
        let (kind, msg) = match self {
            CliError::Usage(m) => ("usage", m),
            CliError::Numerical(m) => ("nonconvergence", m),
            CliError::Internal(m) => ("internal", m),
        };
        format!("error[{kind}]: {}", one_line(msg))
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn default_cache_dir() -> Option<PathBuf> {
    if let Some(d) = std::env::var_os(CACHE_ENV).filter(|d| !d.is_empty()) {
        return Some(PathBuf::from(d));
    }
    if let Some(d) = std::env::var_os("XDG_CACHE_HOME").filter(|d| !d.is_empty()) {
        return Some(PathBuf::from(d).join("ptdirichlet"));
    }
    std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("ptdirichlet"))
}

fn execute(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Cwkb(a) => commands::cwkb(a),
        Command::Shoot(a) => commands::shoot(a),
        Command::Diag(a) => commands::diag(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::TurningPoints(a) => commands::turning(a),
        Command::Toy(a) => commands::toy(a),
        Command::Compare(a) => commands::compare(a),
        Command::Figures(a) => commands::figures(a),
    }
}

/// The single output sink.
fn emit(cli: &Cli, payload: &str) -> Result<(), CliError> {
    match &cli.output {
        Some(p) => std::fs::write(p, payload).map_err(|e| CliError::Internal(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(payload.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Internal(format!("stdout: {e}")))
        }
    }
}

fn finish(code: i32, reason: Option<&str>) -> i32 {
    if let Some(r) = reason {
        eprintln!("{}", CliError::Numerical(r.to_string()).line());
    }
    code
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("{}", CliError::Usage(first.to_string()).line());
            return EXIT_USAGE;
        }
    };
    let env_threads = std::env::var(exec::THREADS_ENV).ok();
    match exec::thread_budget(cli.threads, env_threads.as_deref()) {
        Ok(t) => exec::init_pool(t),
        Err(e) => {
            eprintln!("{}", CliError::Usage(e).line());
            return EXIT_USAGE;
        }
    }

    let cache = if cli.no_cache || !commands::cacheable(&cli.command) {
        None
    } else {
        cli.cache_dir.clone().or_else(default_cache_dir).and_then(|d| Cache::open(&d))
    };
    let key = cache::request_key(&format!("{:?}\n{:?}", cli.command, cli.format));
    if let Some(hit) = cache.as_ref().and_then(|c| c.lookup(&key)) {
        log::info!("served from cache {}", key);
        if let Err(e) = emit(&cli, &hit.payload) {
            eprintln!("{}", e.line());
            return e.exit_code();
        }
        return finish(hit.exit_code, hit.reason.as_deref());
    }

    match execute(&cli.command) {
        Ok(outcome) => {
            let payload = output::render(&outcome.table, cli.format);
            let code = if outcome.nonconverged.is_some() { EXIT_NONCONVERGED } else { EXIT_OK };
            if let Err(e) = emit(&cli, &payload) {
                eprintln!("{}", e.line());
                return e.exit_code();
            }
            if let Some(c) = &cache {
                c.store(&key, code, outcome.nonconverged.as_deref(), &payload);
            }
            finish(code, outcome.nonconverged.as_deref())
        }
        Err(e) => {
            eprintln!("{}", e.line());
            e.exit_code()
        }
    }
}
