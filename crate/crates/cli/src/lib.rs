//! Command-line front end for the `lpcb` bound library.
//!
//! Exit codes: 0 success, 1 bad input, 2 infeasible scene, 3 failed
//! verification.

pub mod commands;
pub mod output;
pub mod scene;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use lpcb::grid::Scale;
use lpcb::AlphaGrid;

use commands::{cmd_bound, cmd_sweep, cmd_verify, GridOverrides, Suite, BOUND_GRID, SWEEP_GRID};
use scene::SceneFile;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("infeasible scene: {0}")]
    Infeasible(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Infeasible(_) => 2,
            _ => 1,
        }
    }
}

impl From<lpcb::Error> for CliError {
    fn from(e: lpcb::Error) -> Self {
        match e {
            lpcb::Error::Infeasible(m) => Self::Infeasible(m),
            other => Self::Input(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridScale {
    Linear,
    Geometric,
}

impl From<GridScale> for Scale {
    fn from(s: GridScale) -> Self {
        match s {
            GridScale::Linear => Scale::Linear,
            GridScale::Geometric => Scale::Geometric,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "lpcb", version, about = "Rényi-divergence exponent bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format (default: json for bound and verify, csv for sweep).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for the randomized verification suites.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Smallest order on the α grid (must exceed 1).
    #[arg(long, global = true)]
    pub alpha_min: Option<f64>,
    /// Largest order on the α grid.
    #[arg(long, global = true)]
    pub alpha_max: Option<f64>,
    /// Number of α grid points.
    #[arg(long, global = true)]
    pub alpha_points: Option<usize>,
    /// Spacing of the α grid; geometric spacing is in α − 1.
    #[arg(long, global = true, value_enum)]
    pub alpha_scale: Option<GridScale>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimized upper and lower bounds for a scene.
    Bound { scene: PathBuf },
    /// Pointwise bounds along a parameter grid.
    Sweep {
        scene: PathBuf,
        #[arg(long, default_value = "alpha")]
        param: String,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
}

impl Cli {
    fn overrides(&self) -> GridOverrides {
        GridOverrides {
            min: self.alpha_min,
            max: self.alpha_max,
            points: self.alpha_points,
            scale: self.alpha_scale.map(Scale::from),
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Caps rayon's global pool at `LPCB_THREADS` workers when set.
fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("LPCB_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Input(format!("LPCB_THREADS = {v:?} is not a positive integer")))?;
    // A second initialization in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    configure_threads()?;
    match &cli.command {
        Command::Bound { scene } => {
            let scene = SceneFile::from_path(scene)?;
            let spec = cli.overrides().apply(scene.alpha_grid, BOUND_GRID);
            let grid = AlphaGrid::from_spec(&spec)?;
            let report = cmd_bound(&scene, &grid)?;
            let text = match cli.format.unwrap_or(Format::Json) {
                Format::Table => output::bound_table(&report),
                Format::Json | Format::Csv => output::json(&report),
            };
            emit(cli, &text)?;
            Ok(if report.feasible() { 0 } else { 2 })
        }
        Command::Sweep { scene, param } => {
            let scene = SceneFile::from_path(scene)?;
            let spec = cli.overrides().apply(scene.alpha_grid, SWEEP_GRID);
            let grid = AlphaGrid::from_spec(&spec)?;
            let rows = cmd_sweep(&scene, param, grid.values())?;
            let text = match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => output::sweep_csv(&rows)?,
                Format::Table => output::sweep_table(&rows),
                Format::Json => output::json(&rows),
            };
            emit(cli, &text)?;
            Ok(0)
        }
        Command::Verify { suite } => {
            let report = cmd_verify(*suite, cli.seed)?;
            emit(cli, &output::json(&report))?;
            Ok(if report.passed { 0 } else { 3 })
        }
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
