//! Single executable exposing the pipeline: pair generation, exact
//! matching, training, evaluation, runtime benchmarking and ablations.

mod commands;
mod config_file;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config_file::ConfigFile;
use error::CliError;

#[derive(Parser)]
#[command(
    name = "aednet",
    version,
    about = "Subgraph matching: learned attention model plus an exact backtracking matcher"
)]
struct Cli {
    /// Master random seed; every random choice derives from it.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// TOML config file; explicit flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for artifacts and the run manifest.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for parallel generation and evaluation
    /// (training and benchmarking stay sequential).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Human-readable progress instead of a machine summary line.
    #[arg(long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate (data graph, query graph, ground truth) pair files
    Gen(commands::gen::GenArgs),
    /// Run the exact matcher over every pair in a pair file
    Match(commands::match_cmd::MatchArgs),
    /// Train a model on generated pairs
    Train(commands::train::TrainArgs),
    /// Evaluate a checkpoint on a pair file
    Eval(commands::eval::EvalArgs),
    /// Time exact matching against model inference
    Bench(commands::bench::BenchArgs),
    /// Train and evaluate the full model and both single-mechanism ablations
    Ablate(commands::ablate::AblateArgs),
}

/// Values shared by every subcommand after flag/config resolution.
pub struct Globals {
    pub seed: u64,
    pub out: PathBuf,
    pub verbose: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    env_logger::Builder::new()
        .filter_level(if cli.verbose {
            log::LevelFilter::Info
        } else {
            log::LevelFilter::Warn
        })
        .format_timestamp(None)
        .init();

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::empty(),
    };

    let seed = config_file::resolve(cli.seed, file.get("global", "seed"), 42)?;
    let threads = config_file::resolve_opt(cli.threads, file.get("global", "threads"))?;
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::usage("--threads must be >= 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Data(format!("thread pool: {e}")))?;
    }

    let default_out = match &cli.command {
        Command::Gen(_) => "pairs",
        Command::Match(_) => "match-out",
        Command::Train(_) => "train-out",
        Command::Eval(_) => "eval-out",
        Command::Bench(_) => "bench-out",
        Command::Ablate(_) => "ablate-out",
    };
    let out = cli.out.unwrap_or_else(|| PathBuf::from(default_out));
    let globals = Globals {
        seed,
        out,
        verbose: cli.verbose,
    };

    match cli.command {
        Command::Gen(args) => commands::gen::run(&globals, &file, args),
        Command::Match(args) => commands::match_cmd::run(&globals, &file, args),
        Command::Train(args) => commands::train::run(&globals, &file, args),
        Command::Eval(args) => commands::eval::run(&globals, &file, args),
        Command::Bench(args) => commands::bench::run(&globals, &file, args),
        Command::Ablate(args) => commands::ablate::run(&globals, &file, args),
    }
}
