//! Command-line driver: solves the RBC model with the five PPI algorithms,
//! quadratizes polynomial files, runs the cyclic-anneal experiments and
//! simulates consumption paths.
//!
//! Settings resolve as defaults, then the `--config` file, then flags.

pub mod artifacts;
pub mod commands;
pub mod config;
pub mod error;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use commands::{QuadMethod, QuadratizeOptions, Report, SavingsSource};
use config::{Algorithm, Engine, RunConfig};
use error::Result;

#[derive(Debug, Parser)]
#[command(
    name = "annealdp",
    version,
    about = "Dynamic programming by emulated annealing"
)]
pub struct Cli {
    /// `key = value` settings file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub engine: Option<Engine>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a policy iteration algorithm on the RBC model.
    Solve(RunArgs),
    /// Reduce a polynomial file to quadratic form.
    Quadratize(QuadratizeArgs),
    /// Single- and two-cycle anneals of the two small cyclic problems.
    Cycles(RunArgs),
    /// Consumption after a negative productivity shock.
    Simulate(SimulateArgs),
    /// Time the main pipeline stages.
    Bench(RunArgs),
}

#[derive(Debug, Args, Default)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub algorithm: Option<Algorithm>,
    #[arg(long)]
    pub reads: Option<usize>,
    /// Forward anneal time or cyclic segment time (us).
    #[arg(long)]
    pub anneal_time: Option<f64>,
    #[arg(long)]
    pub cycles: Option<usize>,
    /// Anneal fraction reached by each reversal.
    #[arg(long)]
    pub reversal: Option<f64>,
    #[arg(long)]
    pub executions: Option<usize>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub keep_fraction: Option<f64>,
    /// Top bit index of the merged-problem encodings.
    #[arg(long)]
    pub width: Option<usize>,
    /// Start from the true parameters.
    #[arg(long)]
    pub init_true: bool,
    /// Any config key, as `key=value`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Args)]
pub struct QuadratizeArgs {
    pub input: PathBuf,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "full")]
    pub method: QuadMethod,
    /// Substitution penalty weight.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Variables of the ELC term, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub elc_vars: Vec<usize>,
    /// Excluded assignment of the ELC term, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub elc_assign: Vec<u8>,
    /// Check the reduction against the original by enumeration.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub x1: Option<f64>,
    /// `estimates.csv` of a previous solve.
    #[arg(long, conflicts_with = "x1")]
    pub from: Option<PathBuf>,
    #[arg(long, conflicts_with_all = ["x1", "from"])]
    pub true_params: bool,
    #[arg(long)]
    pub shock_index: Option<usize>,
    #[arg(long)]
    pub periods: Option<usize>,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

impl RunArgs {
    fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        cfg.apply_pairs(&self.set)?;
        if let Some(a) = self.algorithm {
            cfg.algorithm = a;
        }
        if let Some(v) = self.reads {
            cfg.reads = Some(v);
        }
        if let Some(v) = self.anneal_time {
            cfg.anneal_time = v;
        }
        if let Some(v) = self.cycles {
            cfg.cycles = v;
        }
        if let Some(v) = self.reversal {
            cfg.reversal = v;
        }
        if let Some(v) = self.executions {
            cfg.executions = v;
        }
        if let Some(v) = self.iterations {
            cfg.iterations = Some(v);
        }
        if let Some(v) = self.keep_fraction {
            cfg.keep_fraction = v;
        }
        if let Some(v) = self.width {
            cfg.width = v;
        }
        if self.init_true {
            cfg.init_true = true;
        }
        Ok(())
    }
}

impl Cli {
    /// Defaults, then the config file, then command-line values.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        match &self.command {
            Command::Solve(a) | Command::Cycles(a) | Command::Bench(a) => a.apply(&mut cfg)?,
            Command::Simulate(a) => {
                cfg.apply_pairs(&a.set)?;
                if let Some(v) = a.x1 {
                    cfg.x1 = Some(v);
                }
                if let Some(v) = a.shock_index {
                    cfg.shock_index = v;
                }
                if let Some(v) = a.periods {
                    cfg.periods = v;
                }
            }
            Command::Quadratize(_) => {}
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(d) = &self.out_dir {
            cfg.out_dir = d.clone();
        }
        if let Some(e) = self.engine {
            cfg.engine = e;
        }
        Ok(cfg)
    }
}

pub fn run(cli: &Cli) -> Result<Report> {
    let cfg = cli.resolve()?;
    match &cli.command {
        Command::Solve(_) => commands::solve(&cfg),
        Command::Cycles(_) => commands::cycles(&cfg),
        Command::Bench(_) => commands::bench(&cfg),
        Command::Simulate(a) => {
            let source = if a.true_params {
                SavingsSource::TrueParameters
            } else if let Some(p) = &a.from {
                SavingsSource::Estimates(p.clone())
            } else {
                SavingsSource::Configured
            };
            commands::simulate(&cfg, &source)
        }
        Command::Quadratize(a) => commands::quadratize(
            &cfg,
            &QuadratizeOptions {
                input: a.input.clone(),
                output: a.output.clone(),
                method: a.method,
                gamma: a.gamma,
                elc_vars: a.elc_vars.clone(),
                elc_assign: a.elc_assign.clone(),
                verify: a.verify,
            },
        ),
    }
}
