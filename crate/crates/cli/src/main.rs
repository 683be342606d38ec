mod commands;
mod config;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tractlab::{Condition, ModelKind};

use crate::config::CliError;

#[derive(Debug, Parser)]
#[command(name = "tractlab", version, about = "Vocal-tract vowel spaces from a three-phase mixing function")]
struct Cli {
    /// JSON document overriding model geometry, frequency grid and acoustic constants.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, env = "TRACTLAB_OUT", default_value = ".")]
    out: PathBuf,

    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

fn parse_model(s: &str) -> Result<ModelKind, String> {
    s.parse().map_err(|e: tractlab::TractError| e.to_string())
}

fn parse_condition(s: &str) -> Result<Condition, String> {
    s.parse().map_err(|e: tractlab::TractError| e.to_string())
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Area functions and formants of the eight characteristic vowels.
    Vowels {
        #[arg(long, value_parser = parse_model)]
        model: ModelKind,
    },
    /// The ρ = 1 vowel ring in the (f1, f2) plane.
    Space {
        #[arg(long, value_parser = parse_model)]
        model: ModelKind,
    },
    /// Monte Carlo dataset for condition C1 or C2.
    Mc {
        #[arg(long, value_parser = parse_model)]
        model: ModelKind,
        #[arg(long, value_parser = parse_condition)]
        condition: Condition,
        /// Number of random draws (C2 adds them to the ring).
        #[arg(long, default_value_t = 5000)]
        n: usize,
    },
    /// Functional check of a dataset CSV written by `mc`.
    Analyze {
        dataset: PathBuf,
        #[arg(long, default_value_t = tractlab::experiments::DEFAULT_BIN_WIDTH)]
        bin_width: f64,
        /// Defaults to the calibrated threshold of the dataset's model.
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Transfer spectrum and formants of one configuration.
    Spectrum {
        #[arg(long, value_parser = parse_model)]
        model: ModelKind,
        #[arg(long, default_value_t = 0.0)]
        rho: f64,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        /// Explicit parameter vector, comma separated; overrides --rho/--theta.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        params: Option<Vec<f64>>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let ctx = commands::Context::new(cli.config.as_deref(), cli.out, cli.seed)?;
    match cli.command {
        Command::Vowels { model } => commands::vowels(&ctx, model),
        Command::Space { model } => commands::space(&ctx, model),
        Command::Mc { model, condition, n } => commands::mc(&ctx, model, condition, n),
        Command::Analyze {
            dataset,
            bin_width,
            threshold,
        } => commands::analyze(&ctx, &dataset, bin_width, threshold),
        Command::Spectrum {
            model,
            rho,
            theta,
            params,
        } => commands::spectrum(&ctx, model, rho, theta, params),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tractlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
