//! `qwerner`: grids, sweeps and verification runs for photon-added
//! quasi-Werner states.
//!
//! Exit codes: 0 success, 1 failed verification, 2 configuration error,
//! 3 numerical error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod output;

use config::{FileConfig, Format, Overrides};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(qwerner::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Numeric(e) => write!(f, "numerical error: {e}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "qwerner", version, about = "Photon-added quasi-Werner state numerics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Two-mode Wigner function on a phase-space grid.
    Wigner(Common),
    /// Two-mode and reduced Wigner logarithmic negativity over a parameter sweep.
    Wln(Common),
    /// Concurrence, EOF, discord and the Wigner value at a fixed phase point.
    Correlations(Common),
    /// Teleportation fidelity curves against the mixing parameter.
    Fidelity(Common),
    /// Closed forms against the truncated Fock-space oracle.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Mixed-part convention: `subspace` or `paper-flat`.
    #[arg(long)]
    convention: Option<String>,
    /// Absolute quadrature tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Worker threads; output does not depend on this.
    #[arg(long)]
    jobs: Option<usize>,
    /// Channel model for fidelity: `closed-form` or `exact`.
    #[arg(long)]
    channel: Option<String>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            out: self.out.clone(),
            format: self.format.as_deref().map(|f| f.parse::<Format>().expect("validated by clap")),
            convention: self.convention.clone(),
            tol: self.tol,
            jobs: self.jobs,
            channel: self.channel.clone(),
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let common = match &cli.command {
        Command::Wigner(c) | Command::Wln(c) | Command::Correlations(c) | Command::Fidelity(c) | Command::Verify(c) => c,
    };
    if common.channel.is_some() && !matches!(cli.command, Command::Fidelity(_) | Command::Verify(_)) {
        return Err(CliError::Config("--channel applies to fidelity and verify only".into()));
    }
    let file = FileConfig::load(common.config.as_deref())?;
    let flags = common.overrides();
    match cli.command {
        Command::Wigner(_) => commands::wigner(&file, &flags).map(|_| true),
        Command::Wln(_) => commands::wln(&file, &flags).map(|_| true),
        Command::Correlations(_) => commands::correlations(&file, &flags).map(|_| true),
        Command::Fidelity(_) => commands::fidelity(&file, &flags).map(|_| true),
        Command::Verify(_) => commands::verify(&file, &flags),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("qwerner: {e}");
            ExitCode::from(match e {
                CliError::Config(_) => 2,
                CliError::Numeric(_) => 3,
            })
        }
    }
}
