//! `netreduce`: rank buses, build DC Ward equivalents and compare models.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Format, Layer, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "netreduce", version, about = "Node ranking and DC Ward reduction of power grids")]
struct Cli {
    /// TOML file with default settings; flags and NETREDUCE_* variables win.
    #[arg(long, global = true, env = "NETREDUCE_CONFIG")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Case file (MATPOWER `.m` or native JSON) or `ieee30` for the built-in case.
    #[arg(long, env = "NETREDUCE_CASE")]
    case: Option<String>,
    /// Output directory.
    #[arg(long, env = "NETREDUCE_OUT")]
    out: Option<PathBuf>,
    /// Belief level of the rank encoding, in (0, 1].
    #[arg(long, env = "NETREDUCE_BETA")]
    beta: Option<f64>,
    /// Weights of C2 and C3 in the comprehensive criterion, e.g. `0.5,0.5`.
    #[arg(long, env = "NETREDUCE_WEIGHTS", value_delimiter = ',')]
    weights: Option<Vec<f64>>,
    /// Format of tabular outputs.
    #[arg(long, value_enum, env = "NETREDUCE_FORMAT")]
    format: Option<Format>,
    #[arg(long, env = "NETREDUCE_SEED")]
    seed: Option<u64>,
}

impl Common {
    fn layer(self) -> Layer {
        Layer {
            case: self.case,
            out: self.out,
            beta: self.beta,
            weights: self.weights,
            format: self.format,
            seed: self.seed,
            ..Default::default()
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score and rank every bus by the selected criteria.
    Rank {
        #[command(flatten)]
        common: Common,
        /// Criteria to compute, e.g. `c1,c4`.
        #[arg(long, env = "NETREDUCE_CRITERIA", value_delimiter = ',')]
        criteria: Option<Vec<String>>,
        /// Length of the lowest-ranked table.
        #[arg(long, env = "NETREDUCE_K")]
        k: Option<usize>,
    },
    /// Eliminate the k lowest-ranked buses of one criterion.
    Reduce {
        #[command(flatten)]
        common: Common,
        #[arg(long, env = "NETREDUCE_CRITERION")]
        criterion: Option<String>,
        #[arg(long, env = "NETREDUCE_K")]
        k: Option<usize>,
        /// Equivalent branches above this reactance (pu) are pruned.
        #[arg(long, env = "NETREDUCE_X_MAX")]
        x_max: Option<f64>,
        /// Keep generator buses instead of relocating their output.
        #[arg(long, env = "NETREDUCE_RETAIN_GENERATORS", action = clap::ArgAction::Set)]
        retain_generators: Option<bool>,
        /// Also write the reduced case in MATPOWER format.
        #[arg(long)]
        matpower: bool,
    },
    /// Topological properties of the full case and of reduced models.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Reduced model files to compare against `--case`.
        #[arg(required = true)]
        models: Vec<PathBuf>,
    },
    /// Check the built-in reference vectors and fuzz the fusion rule.
    Selftest {
        #[command(flatten)]
        common: Common,
        /// Number of random fusion cases.
        #[arg(long, default_value_t = 1000)]
        fuzz: usize,
    },
}

/// An error with the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub error: anyhow::Error,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            error: anyhow::anyhow!(message.into()),
        }
    }

    pub fn usage_from(error: anyhow::Error) -> Self {
        Self { code: 2, error }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(error: anyhow::Error) -> Self {
        Self { code: 1, error }
    }
}

impl From<netreduce_core::Error> for CliError {
    fn from(error: netreduce_core::Error) -> Self {
        Self {
            code: 1,
            error: error.into(),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => Layer::from_file(path)?,
        None => Layer::default(),
    };
    match cli.command {
        Command::Rank { common, criteria, k } => {
            let flags = Layer {
                criteria,
                k,
                ..common.layer()
            };
            commands::rank(&RunConfig::resolve(flags.over(file))?)
        }
        Command::Reduce {
            common,
            criterion,
            k,
            x_max,
            retain_generators,
            matpower,
        } => {
            let flags = Layer {
                criterion,
                k,
                x_max,
                retain_generators,
                ..common.layer()
            };
            commands::reduce(&RunConfig::resolve(flags.over(file))?, matpower)
        }
        Command::Compare { common, models } => {
            commands::compare(&RunConfig::resolve(common.layer().over(file))?, &models)
        }
        Command::Selftest { common, fuzz } => {
            commands::selftest(&RunConfig::resolve(common.layer().over(file))?, fuzz)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {:#}", e.error);
            ExitCode::from(e.code)
        }
    }
}
