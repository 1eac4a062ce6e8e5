//! `scc`: construction, encoding, erasure decoding and density evolution
//! for spatially-coupled LDPC codes.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use commands::{
    BenchOpts, ConstructOpts, DecodeSimOpts, EncodeOpts, RateTableOpts, ThresholdOpts, TrajectoryOpts, VerifyOpts,
};

#[derive(Parser, Debug)]
#[command(
    name = "scc",
    version,
    about = "Spatially-coupled LDPC codes with accumulator termination"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct GlobalArgs {
    /// Master seed. Randomized runs without one draw a seed and record it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (default: stdout).
    #[arg(short, long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Suppress progress and summary messages on stderr.
    #[arg(short, long, global = true)]
    #[serde(default)]
    pub quiet: bool,
    /// TOML file with default option values; flags take precedence.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a lifted code and write it as JSON (and optionally alist).
    Construct(ConstructOpts),
    /// Encode an information file (or random information) with a code file.
    Encode(EncodeOpts),
    /// Monte Carlo peeling decoding over the erasure channel.
    DecodeSim(DecodeSimOpts),
    /// BP thresholds by density evolution.
    Threshold(ThresholdOpts),
    /// Per-section erasure probabilities along the DE iterations.
    Trajectory(TrajectoryOpts),
    /// Exact and 5-decimal design rates.
    RateTable(RateTableOpts),
    /// Generic versus accumulator termination cost.
    BenchTermination(BenchOpts),
    /// Check a code file, and optionally a codeword against it.
    Verify(VerifyOpts),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Construct(_) => "construct",
            Command::Encode(_) => "encode",
            Command::DecodeSim(_) => "decode-sim",
            Command::Threshold(_) => "threshold",
            Command::Trajectory(_) => "trajectory",
            Command::RateTable(_) => "rate-table",
            Command::BenchTermination(_) => "bench-termination",
            Command::Verify(_) => "verify",
        }
    }
}

fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("SCC_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| anyhow::anyhow!("SCC_THREADS must be a positive integer, got {v:?}"))?;
        if n == 0 {
            anyhow::bail!("SCC_THREADS must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    init_threads()?;
    let section = cli.command.name();
    let (global, file) = match &cli.global.config {
        Some(path) => {
            let mut file = config::load(path, section)?;
            let mut g = serde_json::Map::new();
            for key in ["seed", "out", "format", "quiet"] {
                if let Some(v) = file.remove(key) {
                    g.insert(key.to_string(), v);
                }
            }
            let mut global: GlobalArgs = config::merge(&cli.global, g)?;
            global.quiet |= cli.global.quiet;
            (global, file)
        }
        None => (cli.global.clone(), Default::default()),
    };
    match cli.command {
        Command::Construct(o) => commands::construct(config::merge(&o, file)?, &global),
        Command::Encode(o) => commands::encode(config::merge(&o, file)?, &global),
        Command::DecodeSim(o) => commands::decode_sim(config::merge(&o, file)?, &global),
        Command::Threshold(o) => commands::threshold(config::merge(&o, file)?, &global),
        Command::Trajectory(o) => commands::trajectory(config::merge(&o, file)?, &global),
        Command::RateTable(o) => commands::rate_table(config::merge(&o, file)?, &global),
        Command::BenchTermination(o) => commands::bench_termination(config::merge(&o, file)?, &global),
        Command::Verify(o) => commands::verify(config::merge(&o, file)?, &global),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
