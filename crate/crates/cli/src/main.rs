//! `oupairs` — research CLI for OU-fit pair formation, s-score signal
//! backtests, threshold sweeps, and in-sample-length studies.

mod commands;
mod config;
mod report;

use clap::{Parser, Subcommand};
use commands::{cmd_backtest, cmd_fit, cmd_simulate, cmd_study, cmd_sweep, write_and_print};
use config::{CommonArgs, RunConfig};

#[derive(Parser)]
#[command(name = "oupairs", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Form the pair on the in-sample window and print the fitted parameters.
    Fit(CommonArgs),
    /// Run the threshold grid in sample; emit per-metric heatmap CSVs and best.txt.
    Sweep(CommonArgs),
    /// Simulate from the fitted parameters, refit, and compare.
    Simulate(CommonArgs),
    /// Replay the chosen (or best) thresholds; emit per-day ledger CSVs.
    Backtest(CommonArgs),
    /// Sweep every in-sample length and flag the most predictive one.
    Study(CommonArgs),
}

fn main() {
    let cli = Cli::parse();
    let (args, run) = match &cli.command {
        Command::Fit(a) => (a, cmd_fit as fn(&RunConfig) -> anyhow::Result<commands::CmdOutput>),
        Command::Sweep(a) => (a, cmd_sweep as _),
        Command::Simulate(a) => (a, cmd_simulate as _),
        Command::Backtest(a) => (a, cmd_backtest as _),
        Command::Study(a) => (a, cmd_study as _),
    };

    let outcome = RunConfig::resolve(args).and_then(|cfg| {
        let output = run(&cfg)?;
        write_and_print(&cfg, output)
    });
    if let Err(e) = outcome {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
