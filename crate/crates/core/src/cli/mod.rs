//! Command-line front end: configuration, dispatch and result files.
//!
//! A run is described by an optional TOML file whose keys mirror
//! [`RawConfig`]; flags override the file. Exit codes: 0 success, 2 invalid
//! input, 3 divergence, 4 non-convergence, 1 for failed `verify` checks and
//! I/O failures.

mod commands;
mod config;
mod initial;
pub mod io;
mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::params::ModelKind;

pub use commands::{exit_code, run, Outcome, RunSummary};
pub use config::{
    CommandKind, ExperimentConfig, GridConfig, RawConfig, RawGrid, RawInitial, RawSolver, RawTime,
    SolverConfig, TimeConfig,
};
pub use initial::{InitialCondition, InitialFamily};
pub use verify::{run_checks, Check};

#[derive(Debug, Parser)]
#[command(name = "kinchem", version, about = "Kinetic chemotaxis laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Time-dependent kinetic simulation and moment time series.
    Simulate(Overrides),
    /// Moment ODE system and its stability.
    Moments(Overrides),
    /// Table of critical masses M_N.
    CriticalMass(Overrides),
    /// Steady state for supercritical mass.
    Stationary(Overrides),
    /// Reduced-scale invariant suite.
    Verify(Overrides),
}

impl Command {
    fn split(self) -> (CommandKind, Overrides) {
        match self {
            Command::Simulate(o) => (CommandKind::Simulate, o),
            Command::Moments(o) => (CommandKind::Moments, o),
            Command::CriticalMass(o) => (CommandKind::CriticalMass, o),
            Command::Stationary(o) => (CommandKind::Stationary, o),
            Command::Verify(o) => (CommandKind::Verify, o),
        }
    }
}

/// Flags shared by every subcommand; each one overrides a config key.
#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<ModelKind>,
    /// Total mass M.
    #[arg(long, short = 'M', allow_negative_numbers = true)]
    pub mass: Option<f64>,
    /// Spatial half-width L.
    #[arg(long, allow_negative_numbers = true)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub n_x: Option<usize>,
    /// Velocity half-width V.
    #[arg(long, allow_negative_numbers = true)]
    pub v_max: Option<f64>,
    #[arg(long)]
    pub n_v: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t_end: Option<f64>,
    /// Steps between recorded samples.
    #[arg(long)]
    pub stride: Option<usize>,
    /// Recorded samples between field snapshots.
    #[arg(long)]
    pub snapshot_every: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Highest moment order.
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub m_max: Option<f64>,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub anderson: Option<usize>,
    /// Also run the Fourier-space stationary solver.
    #[arg(long)]
    pub spectral: bool,
    /// gaussian-product, exponential-signal, double-bump or file.
    #[arg(long)]
    pub family: Option<InitialFamily>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub centers: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub widths: Option<Vec<f64>>,
    /// Field file for the `file` family.
    #[arg(long)]
    pub init_file: Option<PathBuf>,
}

impl Overrides {
    fn to_raw(&self, command: CommandKind) -> RawConfig {
        RawConfig {
            command: Some(command),
            model: self.model,
            mass: self.mass,
            out: self.out.clone(),
            grid: RawGrid {
                l: self.x_max,
                n_x: self.n_x,
                v: self.v_max,
                n_v: self.n_v,
            },
            time: RawTime {
                dt: self.dt,
                t_end: self.t_end,
                stride: self.stride,
                snapshot_every: self.snapshot_every,
            },
            solver: RawSolver {
                tol: self.tol,
                max_iter: self.max_iter,
                order: self.order,
                n_max: self.n_max,
                m_max: self.m_max,
                nodes: self.nodes,
                anderson: self.anderson,
                spectral: self.spectral.then_some(true),
            },
            initial: RawInitial {
                family: self.family,
                centers: self.centers.clone(),
                widths: self.widths.clone(),
                path: self.init_file.clone(),
            },
        }
    }
}

/// Merges the config file (if any) with the flags and validates.
pub fn resolve(command: Command) -> crate::Result<ExperimentConfig> {
    let (kind, flags) = command.split();
    let base = match &flags.config {
        Some(path) => RawConfig::from_file(path).map_err(|e| match e {
            Error::Io(io) => Error::Format(format!("cannot read {}: {io}", path.display())),
            other => other,
        })?,
        None => RawConfig::default(),
    };
    ExperimentConfig::resolve(base.overlay(&flags.to_raw(kind)))
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
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
    let cfg = match resolve(cli.command) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    match run(&cfg) {
        Ok(summary) => {
            for line in &summary.lines {
                println!("{line}");
            }
            for file in &summary.files {
                println!("wrote {}", file.display());
            }
            summary.outcome.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
