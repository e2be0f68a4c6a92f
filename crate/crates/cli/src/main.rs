//! `rsbench`: generate synthetic data, fit positive models, build IVF
//! indexes and write budget, nprobe, codec and density reports.

mod commands;
mod config;
mod error;
mod manifest;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::{exit, CliError, CliResult};

#[derive(Parser)]
#[command(name = "rsbench", version, about = "Range search benchmarking toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Debug)]
pub struct CommonArgs {
    /// JSON configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the configuration's seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset with planted groups.
    Gen(CommonArgs),
    /// Fit a positive-probability model on the train split.
    Fit(CommonArgs),
    /// Train and save an IVF index over the database split.
    Build(CommonArgs),
    /// RSM and oracle positives against the verification budget.
    SweepBudget(CommonArgs),
    /// RSM and recall@1 against the number of probed partitions.
    SweepNprobe(CommonArgs),
    /// RSM and recall@1 for a list of codecs over shared partitions.
    CodecTable(CommonArgs),
    /// Pair-distance density curves.
    Density(CommonArgs),
}

fn init_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("RSBENCH_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::config(format!("RSBENCH_THREADS must be a positive integer, got {raw:?}")))?;
    rsbench::par::init_thread_pool(n).map_err(CliError::config)
}

fn run(cli: Cli) -> CliResult<()> {
    init_threads()?;
    match cli.command {
        Command::Gen(a) => commands::gen::run(&a),
        Command::Fit(a) => commands::fit::run(&a),
        Command::Build(a) => commands::build::run(&a),
        Command::SweepBudget(a) => commands::sweep::run_budget(&a),
        Command::SweepNprobe(a) => commands::sweep::run_nprobe(&a),
        Command::CodecTable(a) => commands::codec_table::run(&a),
        Command::Density(a) => commands::density::run(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::CONFIG as u8 } else { exit::OK as u8 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
