//! `floquet-synth`: batch front end.
//!
//! ```text
//! floquet-synth optimize --target star --L 9 --hub 5 --M 1 --N 10 --T 10 --drive g --gmax 5
//! floquet-synth sweep --mode tmin --target star --tau 1.0 --threshold 0.999 --L 5..10
//! floquet-synth adiabatic --clauses toy3sat.txt --cycles 200 --T 6.38 --N 11
//! ```
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical failure.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "floquet-synth", version, about = "Periodic drive synthesis for driven chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the occupation basis of a sector.
    Basis(Run),
    /// Build a target Hamiltonian and write it as CSV/JSON.
    Target(Run),
    /// Synthesize a drive for a target and extract its effective Hamiltonian.
    Optimize(Run),
    /// Replay a control sequence stroboscopically against the target evolution.
    Evolve(Run),
    /// Adiabatic deformation towards a clause-system cost Hamiltonian.
    Adiabatic(Run),
    /// Fidelity over a (T, N) grid, or minimal period versus chain length.
    Sweep(Run),
}

#[derive(Debug, clap::Args)]
struct Run {
    /// JSON file with any of the flag settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    flags: RunConfig,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<floquet_synth::Error> for CliError {
    fn from(e: floquet_synth::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

fn run(command: Command) -> Result<commands::Outputs, CliError> {
    let (Command::Basis(r)
    | Command::Target(r)
    | Command::Optimize(r)
    | Command::Evolve(r)
    | Command::Adiabatic(r)
    | Command::Sweep(r)) = &command;
    let cfg = RunConfig::merged(r.config.as_deref(), &r.flags)?;
    match command {
        Command::Basis(_) => commands::basis(cfg),
        Command::Target(_) => commands::target(cfg),
        Command::Optimize(_) => commands::optimize(cfg),
        Command::Evolve(_) => commands::evolve(cfg),
        Command::Adiabatic(_) => commands::adiabatic(cfg),
        Command::Sweep(_) => commands::sweep(cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage_error = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(u8::from(usage_error));
        }
    };
    match run(cli.command) {
        Ok(out) => {
            for path in &out.written {
                eprintln!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
