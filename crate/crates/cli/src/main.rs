use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use discrim_cli::{execute, output, Experiment, Format, Overrides};

#[derive(Parser)]
#[command(name = "discrim", version, about = "Two-qubit discrimination experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON experiment config
    #[arg(long)]
    config: PathBuf,
    /// Output file; defaults to $DISCRIM_OUT_DIR/<experiment>.<ext>, else stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Master seed; row i of a grid or curve uses seed + i
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// One orthogonal pair: exact, sampled, Helstrom and no-feed-forward values
    Pair(RunArgs),
    /// The θ₀ × θ₁ grid
    Grid(RunArgs),
    /// Success probabilities of the non-orthogonal pair over η
    Curve(RunArgs),
    /// Simulated tomography and maximum-likelihood reconstruction
    Tomo(RunArgs),
    /// Best product measurement for a pair
    Optimize(RunArgs),
    /// Print the JSON schema of the json output
    Schema,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, args) = match cli.command {
        Command::Pair(a) => (Experiment::Pair, a),
        Command::Grid(a) => (Experiment::Grid, a),
        Command::Curve(a) => (Experiment::Curve, a),
        Command::Tomo(a) => (Experiment::Tomo, a),
        Command::Optimize(a) => (Experiment::Optimize, a),
        Command::Schema => {
            print!("{}", output::SCHEMA);
            return ExitCode::SUCCESS;
        }
    };
    let overrides = Overrides {
        out: args.out,
        format: args.format,
        seed: args.seed,
    };
    match execute(experiment, &args.config, &overrides) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("discrim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
