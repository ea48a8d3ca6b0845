use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use toa_cli::commands;

/// Quantum time-of-arrival distributions and minimum time-energy
/// uncertainty states. Units are atomic (ħ = 1 unless configured).
#[derive(Debug, Parser)]
#[command(name = "toa", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep ⟨E⟩/ε and tabulate the minimum ε·τ.
    WignerCurve {
        #[arg(long, allow_negative_numbers = true)]
        ratio_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        ratio_max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve one ratio E₀/ε and write the energy profile η(E).
    WignerState {
        #[arg(long, allow_negative_numbers = true)]
        ratio: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Arrival densities and current for a configuration file.
    Arrival {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// The built-in barrier-scattering preset at arrival point X.
    Figure2 {
        #[arg(long, allow_negative_numbers = true)]
        position: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::WignerCurve { ratio_min, ratio_max, steps, out } => {
            commands::cmd_wigner_curve(*ratio_min, *ratio_max, *steps, out)
        }
        Command::WignerState { ratio, out } => commands::cmd_wigner_state(*ratio, out),
        Command::Arrival { config, out } => commands::cmd_arrival(config, out),
        Command::Figure2 { position, out } => commands::cmd_figure2(*position, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
