mod cli;
mod commands;
mod config;
mod output;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches};

use cli::{Cli, Format, DEFAULT_SEED};
use output::Meta;

pub const RNG_NAME: &str = "ChaCha8 (rand_chacha 0.9), sample i on stream first+i";

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numeric(m) | CliError::Io(m) => m,
        }
    }
}

impl From<wealthstat::Error> for CliError {
    fn from(e: wealthstat::Error) -> Self {
        if e.is_non_convergence() {
            CliError::Numeric(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("WEALTHSTAT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("invalid WEALTHSTAT_THREADS `{raw}`: expected a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("WEALTHSTAT_THREADS: {e}")))
}

fn run() -> Result<(), CliError> {
    let argv = config::expand(std::env::args().collect())?;
    let command = Cli::command()
        .args_override_self(true)
        .mut_subcommands(|s| s.args_override_self(true));
    let matches = command.try_get_matches_from(argv).unwrap_or_else(|e| e.exit());
    let cli = Cli::from_arg_matches(&matches).unwrap_or_else(|e| e.exit());
    configure_threads()?;

    let table = commands::run(&cli.command, cli.seed.unwrap_or(DEFAULT_SEED))?;
    let meta = Meta {
        command: cli.command.name().to_string(),
        parameters: cli.command.parameters(),
        seed: cli.seed.unwrap_or(DEFAULT_SEED),
        seed_source: if cli.seed.is_some() { "flag" } else { "default" },
    };
    let text = match cli.format {
        Format::Csv => output::render_csv(&meta, &table),
        Format::Json => output::render_json(&meta, &table),
    };
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("writing stdout: {e}"))),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
