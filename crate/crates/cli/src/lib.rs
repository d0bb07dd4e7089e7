//! Batch front end for `shallowwell-core`: series tables, resummation,
//! bound-state solves and comparison sweeps, written as text, CSV or JSON.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use shallowwell_core::GridSpec;

pub use config::{Format, PotentialSpec, RunConfig, Sweep};
pub use error::{CliError, CliResult};
pub use report::{Cell, Report, Table};

/// Caps the worker pool when set to a positive integer.
pub const THREADS_ENV: &str = "SHALLOWWELL_THREADS";

#[derive(Debug, Parser)]
#[command(name = "shallowwell", version, about = "Weak-coupling bound states of shallow 1D wells")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Run configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Highest series order (2-6).
    #[arg(long, global = true)]
    pub order: Option<usize>,
    /// Grid override `L,P,q`.
    #[arg(long, global = true, value_parser = grid_arg)]
    pub grid: Option<GridSpec>,
}

fn grid_arg(v: &str) -> Result<GridSpec, String> {
    config::parse_grid(v).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Series coefficients with error estimates.
    Series,
    /// Series, Padé, variational and shooting energies over a strength sweep.
    Compare,
    /// Padé approximant with the deep-well asymptote split off.
    Pade,
    /// Ground state by shooting.
    Solve,
    /// Finite-regulator fourth order and the divergent block.
    GreensCheck,
}

impl Cli {
    /// The config file (or defaults) with command-line overrides applied.
    pub fn resolve(&self) -> CliResult<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(o) = self.order {
            cfg.order = o;
        }
        if let Some(g) = self.grid {
            cfg.grid = Some(g);
        }
        if let Some(f) = self.format {
            cfg.format = f;
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn execute(command: Command, cfg: &RunConfig) -> CliResult<Report> {
    match command {
        Command::Series => commands::series(cfg),
        Command::Compare => commands::compare(cfg),
        Command::Pade => commands::pade(cfg),
        Command::Solve => commands::solve(cfg),
        Command::GreensCheck => commands::greens_check(cfg),
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?;
    // a pool already built by an earlier call in this process is fine
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn run_parsed(cli: &Cli) -> CliResult<Option<String>> {
    configure_threads()?;
    let cfg = cli.resolve()?;
    let report = execute(cli.command, &cfg)?;
    let text = report.render(cfg.format)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, &text)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            // a closed pipe is not worth a failure exit
            let _ = stdout.write_all(text.as_bytes());
        }
    }
    Ok(report.failure)
}

/// Runs the command line and returns the process exit code: 0 on success,
/// 2 for configuration errors, 3 for numerical failures.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run_parsed(&cli) {
        Ok(None) => 0,
        Ok(Some(why)) => {
            eprintln!("shallowwell: {why}");
            3
        }
        Err(e) => {
            eprintln!("shallowwell: {e}");
            e.exit_code()
        }
    }
}
