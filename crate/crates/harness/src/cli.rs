use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{self, Outcome};
use crate::config::{ExperimentConfig, Overrides};
use crate::error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "weightlab", version, about = "Riesz-product weights, maximal functions and conformal diagnostics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Select N_1..N_K, build ω = M f̃ and archive ω^t for each t.
    BuildWeight(Common),
    /// Doubling, A_p, A_1, BMO, reverse Hölder and norm tables as flat JSON.
    Diagnose(WithArchive),
    /// Welding homeomorphisms h_t with quasisymmetry and BMO tables.
    Welding(WithArchive),
    /// Traced curves with chord-arc, Bloch and Jensen/H^1 probes.
    Curve(WithArchive),
    /// Collate every JSON record in the output directory into summary.json.
    Report(Common),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Flat JSON experiment configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// m in G = 2·3^m.
    #[arg(long)]
    pub grid_exponent: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    /// Truncation K.
    #[arg(long)]
    pub terms: Option<usize>,
    /// Comma-separated powers t.
    #[arg(long = "t", value_delimiter = ',', allow_negative_numbers = true)]
    pub t: Option<Vec<f64>>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct WithArchive {
    #[command(flatten)]
    pub common: Common,
    /// Weight archive to read instead of the configured one.
    #[arg(long)]
    pub archive: Option<PathBuf>,
}

impl Common {
    pub fn resolve(&self) -> CliResult<ExperimentConfig> {
        let overrides = Overrides {
            epsilon: self.epsilon,
            terms: self.terms,
            grid_exponent: self.grid_exponent,
            t_values: self.t.clone(),
            seed: self.seed,
            output_dir: self.out.clone(),
        };
        ExperimentConfig::resolve(self.config.as_deref(), &overrides)
    }
}

pub fn execute(cli: &Cli) -> CliResult<Outcome> {
    match &cli.command {
        Command::BuildWeight(c) => commands::build_weight(&c.resolve()?),
        Command::Diagnose(a) => commands::diagnose(&a.common.resolve()?, a.archive.as_deref()),
        Command::Welding(a) => commands::welding(&a.common.resolve()?, a.archive.as_deref()),
        Command::Curve(a) => commands::curve(&a.common.resolve()?, a.archive.as_deref()),
        Command::Report(c) => commands::report(&c.resolve()?),
    }
}
