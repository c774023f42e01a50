//! Command-line interface: run each worked example end to end, print the
//! resulting tables, and write plot-ready CSV data.

mod commands;
mod config;
mod report;

use clap::{Parser, Subcommand};
use config::FileConfig;
use std::path::PathBuf;
use std::process::ExitCode;

/// Relative-belief inference with Monte Carlo reliability estimates.
///
/// Every command is deterministic given --seed (and the flags): rerunning
/// produces byte-identical output, independent of the worker count.
#[derive(Parser, Debug)]
#[command(name = "relbelief", version, about)]
struct Cli {
    /// TOML file with defaults for any flag; explicit flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Seed for all random streams (env RELBELIEF_SEED, default 1).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Rayon worker threads (0 = automatic). Results do not depend on this.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Monte Carlo sample size for the main loops.
    #[arg(long, global = true)]
    mc: Option<u64>,

    /// Use the large-scale sample size (ten times the desk-scale default).
    #[arg(long, global = true)]
    full_scale: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve prior hyperparameters from virtual-certainty intervals.
    Elicit(commands::elicit::ElicitArgs),
    /// Ratio-of-means inference for one dataset: estimate, plausible region,
    /// credible region, and the pivotal comparison.
    FiellerInfer(commands::fieller::InferArgs),
    /// Ratio-of-means bias estimates: against, in favor, estimation
    /// averages, sample-size sweeps, and the bias curve.
    FiellerBias(commands::fieller::BiasArgs),
    /// The two textbook ratio datasets where pivotal inversion misbehaves.
    Cox(commands::cox::CoxArgs),
    /// Bounded normal mean: bias and confidence tables.
    NormalMean(commands::tables::NormalArgs),
    /// Bounded Poisson rate: bias and confidence tables.
    PoissonMean(commands::tables::PoissonArgs),
}

/// Everything global a command needs.
pub struct Ctx {
    pub seed: u64,
    pub mc: u64,
    pub file: FileConfig,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file = match cli.config.as_deref().map(config::load).transpose() {
        Ok(f) => f.unwrap_or_default(),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let seed = cli
        .seed
        .or(file.seed)
        .or_else(|| std::env::var("RELBELIEF_SEED").ok().and_then(|s| s.parse().ok()))
        .unwrap_or(1);
    let workers = cli.workers.or(file.workers).unwrap_or(0);
    if workers > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global() {
            eprintln!("error: cannot size worker pool: {e}");
            return ExitCode::FAILURE;
        }
    }
    let full_scale = cli.full_scale || file.full_scale.unwrap_or(false);
    let mc = cli
        .mc
        .or(file.mc)
        .unwrap_or(if full_scale { 1_000_000 } else { 100_000 });
    let ctx = Ctx { seed, mc, file };
    let result = match cli.command {
        Command::Elicit(args) => commands::elicit::run(&ctx, args),
        Command::FiellerInfer(args) => commands::fieller::run_infer(&ctx, args),
        Command::FiellerBias(args) => commands::fieller::run_bias(&ctx, args),
        Command::Cox(args) => commands::cox::run(&ctx, args),
        Command::NormalMean(args) => commands::tables::run_normal(&ctx, args),
        Command::PoissonMean(args) => commands::tables::run_poisson(&ctx, args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
