use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eddy_cli::{replay, run, ExperimentKind, ReplayOutcome, RunOptions};

/// Scaling-limit experiments for transport and Euler equations under
/// Lévy transport noise.
#[derive(Parser)]
#[command(name = "eddy", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the isotropy identity `Σ θ_k² σ_k⊗σ_k = I/2`.
    IdentityCheck(RunArgs),
    /// Compare the corrector with `κΔ` along a θ-sequence.
    CorrectorCheck(RunArgs),
    /// Transport equation against the heat equation.
    TransportLimit(RunArgs),
    /// Stochastic Euler against Navier-Stokes.
    EulerLimit(RunArgs),
    /// Re-run a report and compare it with the recorded CSV.
    Replay {
        /// Report directory or its `report.csv`.
        report: PathBuf,
        #[arg(long, env = "EDDY_WORKERS")]
        workers: Option<usize>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, env = "EDDY_OUT")]
    out: Option<PathBuf>,
    #[arg(long, env = "EDDY_WORKERS")]
    workers: Option<usize>,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
}

fn execute(kind: ExperimentKind, args: RunArgs) -> ExitCode {
    let opts = RunOptions { config: args.config, out: args.out, workers: args.workers, seed: args.seed };
    match run(kind, &opts) {
        Ok(outcome) => {
            println!("{:>4} {:>12} {:>14} {:>12} {:>6} {:>9}", "n", "theta_linf", "D", "stderr", "M", "seconds");
            for r in &outcome.rows {
                println!(
                    "{:>4} {:>12.6} {:>14.6e} {:>12.3e} {:>6} {:>9.3}",
                    r.n, r.theta_linf, r.d, r.stderr, r.samples, r.seconds
                );
            }
            let status = if outcome.verdict.pass { "PASS" } else { "FAIL" };
            println!("{kind}: {status} ({})", outcome.verdict.detail);
            println!("report written to {}", outcome.out_dir.display());
            ExitCode::from(if outcome.verdict.pass { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::IdentityCheck(a) => execute(ExperimentKind::IdentityCheck, a),
        Command::CorrectorCheck(a) => execute(ExperimentKind::CorrectorCheck, a),
        Command::TransportLimit(a) => execute(ExperimentKind::TransportLimit, a),
        Command::EulerLimit(a) => execute(ExperimentKind::EulerLimit, a),
        Command::Replay { report, workers } => match replay(&report, workers) {
            Ok(ReplayOutcome::Match) => {
                println!("match");
                ExitCode::SUCCESS
            }
            Ok(ReplayOutcome::Mismatch { row, expected, found }) => {
                println!("mismatch at row {row}");
                println!("  recorded: {expected}");
                println!("  replayed: {found}");
                ExitCode::from(1)
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
    }
}
