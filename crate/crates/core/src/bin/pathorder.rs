use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use pathorder::cli::output::{render, write_artifacts, Format};
use pathorder::cli::{execute, prepare, Command, ExperimentConfig, RunError};

#[derive(Parser)]
#[command(name = "pathorder", version, about = "Path ensembles, entropy and stochastic order on chaotic maps")]
struct Args {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Sample a path ensemble between two cells
    Simulate(Flags),
    /// Solve the maximum-entropy problem for given actions and mean
    Maxent(Flags),
    /// Macroscopic and/or statistical entropy generation
    Entropy(Flags),
    /// Usual stochastic order between random variables or paths
    Order(Flags),
    /// Compare time and space averages
    Ergodic(Flags),
    /// simulate, estimate, entropy, greatest path and partition identity
    Pipeline(Flags),
}

#[derive(clap::Args, Clone)]
struct Flags {
    /// JSON experiment config
    #[arg(long)]
    config: PathBuf,
    /// Directory for report.json, CSV tables and plots
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config seed
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = OutFormat::Json)]
    format: OutFormat,
}

#[derive(ValueEnum, Clone, Copy)]
enum OutFormat {
    Json,
    Csv,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let (command, flags) = match args.command {
        Sub::Simulate(f) => (Command::Simulate, f),
        Sub::Maxent(f) => (Command::Maxent, f),
        Sub::Entropy(f) => (Command::Entropy, f),
        Sub::Order(f) => (Command::Order, f),
        Sub::Ergodic(f) => (Command::Ergodic, f),
        Sub::Pipeline(f) => (Command::Pipeline, f),
    };
    match run(command, &flags) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pathorder {command}: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command, flags: &Flags) -> Result<(), RunError> {
    let config = ExperimentConfig::from_file(&flags.config).map_err(RunError::Config)?;
    let plan = prepare(command, config, flags.seed)?;
    let report = execute(&plan)?;
    if let Some(dir) = &flags.out {
        write_artifacts(&report, dir, plan.svg).map_err(RunError::Runtime)?;
    }
    let format = match flags.format {
        OutFormat::Json => Format::Json,
        OutFormat::Csv => Format::Csv,
    };
    let text = render(&report, format).map_err(RunError::Runtime)?;
    match std::io::stdout().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(RunError::Runtime(e.into())),
        _ => Ok(()),
    }
}
