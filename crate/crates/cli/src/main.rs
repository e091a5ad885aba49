//! `lv4` command-line front end.

mod commands;
mod config;
mod emit;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use config::{Overrides, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("blow-up: {0}")]
    BlowUp(String),
    #[error("normalize: {0}")]
    Normalize(String),
    #[error("io: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::BlowUp(_) => 3,
            CliError::Normalize(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "lv4",
    version,
    about = "Four-species discrete-time predator-prey maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate the map and write trajectory.csv and summary.json
    Simulate(RunArgs),
    /// Linearize at the coexistence fixed point and write classification.json
    Classify(RunArgs),
    /// Sweep the efficiency square and write grid.csv and diagram.ppm
    Diagram(RunArgs),
    /// Rescale efficiencies to unit row sums and write normalized.json
    Normalize(RunArgs),
    /// List the built-in parameter sets
    Presets,
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in parameter set (see `lv4 presets`)
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    generations: Option<usize>,
    /// Diagram grid size N (N x N cells)
    #[arg(long)]
    resolution: Option<usize>,
    /// Output directory [default: .]
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn resolve(self) -> Result<config::Run, CliError> {
        let file = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        file.resolve(Overrides {
            preset: self.preset,
            generations: self.generations,
            resolution: self.resolution,
            out: self.out,
        })
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

type CommandFn = fn(&config::Run) -> Result<Vec<PathBuf>, CliError>;

/// Like `print!`, but a closed pipe (`lv4 presets | head`) is not an error.
fn print_stdout(text: &str) {
    let _ = std::io::stdout().write_all(text.as_bytes());
}

fn run(command: Command) -> Result<(), CliError> {
    let (args, cmd): (RunArgs, CommandFn) = match command {
        Command::Presets => {
            print_stdout(&commands::cmd_presets());
            return Ok(());
        }
        Command::Simulate(a) => (a, commands::cmd_simulate),
        Command::Classify(a) => (a, commands::cmd_classify),
        Command::Diagram(a) => (a, commands::cmd_diagram),
        Command::Normalize(a) => (a, commands::cmd_normalize),
    };
    for path in cmd(&args.resolve()?)? {
        print_stdout(&format!("{}\n", path.display()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print_stdout(&e.to_string());
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!(
                "lv4: error: config: {}",
                one_line(first.trim_start_matches("error: "))
            );
            return ExitCode::from(2);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lv4: error: {}", one_line(&e.to_string()));
            ExitCode::from(e.exit_code())
        }
    }
}
