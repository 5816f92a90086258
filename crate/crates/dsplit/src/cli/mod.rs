//! Command-line interface: argument parsing, config merging, and dispatch.
//!
//! Every command reads an optional JSON config (`--config`), applies flag
//! overrides, runs its experiment, and writes a single CSV to `--out` or
//! stdout. Exit status is zero unless an error other than a recorded
//! instability occurs.

mod commands;
mod config;
mod methods;
mod output;
mod problem;

pub use commands::{
    cmd_converge, cmd_integrate, cmd_kepler, cmd_list_methods, cmd_wave, DEFAULT_KEPLER_BUDGET,
    DEFAULT_KEPLER_ECCENTRICITY, DEFAULT_KEPLER_STRIDE, DEFAULT_SWEEP_LEVELS, DEFAULT_WAVE_GRID,
    WAVE_BLOWUP_FACTOR,
};
pub use config::{ExperimentConfig, OneOrMany};
pub use methods::{method_needs_complex, resolve_method};
pub use output::{format_float, CsvWriter};
pub use problem::{build_problem, build_wave_problem, Problem, ProblemParams, ProblemSetup};

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "dsplit",
    about = "Two-register splitting integrators with paired-register error estimates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the bundled schemes with storage, order, and cost data.
    #[command(name = "list-methods")]
    ListMethods {
        /// Write CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fixed-step convergence sweep with per-register errors and slopes.
    Converge(RunArgs),
    /// Periodic advection benchmark (accuracy vs evaluation count).
    Wave(RunArgs),
    /// Two-body orbit benchmark at a fixed evaluation budget.
    Kepler(RunArgs),
    /// Integrate one problem and emit the step trace.
    Integrate(RunArgs),
}

/// Flags shared by the experiment commands; every flag overrides the
/// matching config-file field.
#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Problem name: exp, oscillator, ramp, modulated, kepler, or wave.
    #[arg(long)]
    pub problem: Option<String>,
    /// Method name or scheme-file path (repeat for sweeps).
    #[arg(long)]
    pub method: Vec<String>,
    /// Step size (repeat for sweeps); mutually exclusive with --tol.
    #[arg(long)]
    pub h: Vec<f64>,
    /// Adaptive error tolerance; mutually exclusive with --h.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Start time (default 0).
    #[arg(long)]
    pub t0: Option<f64>,
    /// End time (default depends on the problem).
    #[arg(long)]
    pub tf: Option<f64>,
    /// Grid size for the wave problem.
    #[arg(long)]
    pub n: Option<usize>,
    /// Orbit eccentricity for the Kepler problem.
    #[arg(long)]
    pub e: Option<f64>,
    /// Total evaluation budget for the kepler command.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Record every n-th sample.
    #[arg(long)]
    pub stride: Option<usize>,
    /// Halvings applied when a sweep gets a single base --h.
    #[arg(long)]
    pub levels: Option<usize>,
}

impl RunArgs {
    /// Loads the config file (when given) and applies flag overrides.
    pub fn experiment(&self) -> Result<ExperimentConfig> {
        if !self.h.is_empty() && self.tol.is_some() {
            return Err(Error::Config(
                "--h and --tol are mutually exclusive".into(),
            ));
        }
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        if self.problem.is_some() {
            cfg.problem = self.problem.clone();
        }
        if !self.method.is_empty() {
            cfg.method = Some(OneOrMany::Many(self.method.clone()));
        }
        if !self.h.is_empty() {
            cfg.h = Some(OneOrMany::Many(self.h.clone()));
            cfg.tol = None;
        }
        if self.tol.is_some() {
            cfg.tol = self.tol;
            cfg.h = None;
        }
        if self.t0.is_some() {
            cfg.t0 = self.t0;
        }
        if self.tf.is_some() {
            cfg.tf = self.tf;
        }
        if self.n.is_some() {
            cfg.n = self.n;
        }
        if self.e.is_some() {
            cfg.e = self.e;
        }
        if self.budget.is_some() {
            cfg.budget = self.budget;
        }
        if self.out.is_some() {
            cfg.output = self.out.clone();
        }
        if self.stride.is_some() {
            cfg.sample_stride = self.stride;
        }
        if self.levels.is_some() {
            cfg.levels = self.levels;
        }
        Ok(cfg)
    }
}

/// Runs one parsed command to completion.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::ListMethods { out } => cmd_list_methods(out.as_deref()),
        Command::Converge(args) => cmd_converge(&args.experiment()?),
        Command::Wave(args) => cmd_wave(&args.experiment()?),
        Command::Kepler(args) => cmd_kepler(&args.experiment()?),
        Command::Integrate(args) => cmd_integrate(&args.experiment()?),
    }
}
