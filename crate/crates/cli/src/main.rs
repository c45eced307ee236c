mod experiment;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use experiment::Experiment;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] circlewalk_core::Error),
    #[error("config: {0}")]
    Config(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "circlewalk", version, about = "Exact and simulated random walks on the circle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config file.
    Run {
        config: PathBuf,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Suppress the summary.
        #[arg(long)]
        quiet: bool,
    },
    /// List built-in step distributions, irrationals and test functions.
    Presets,
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("CIRCLEWALK_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("CIRCLEWALK_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn run(config: &Path, out: &Path, quiet: bool) -> Result<(), CliError> {
    let text = std::fs::read_to_string(config)?;
    let experiment: Experiment = serde_json::from_str(&text)?;
    let outcome = experiment.run()?;
    let written = output::write_all(out, &outcome.artifacts)?;
    if !quiet {
        for line in &outcome.summary {
            println!("{line}");
        }
        for path in written {
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match cli.command {
        Command::Presets => {
            print!("{}", circlewalk_core::config::list_presets());
            ExitCode::SUCCESS
        }
        Command::Run { config, out, quiet } => match run(&config, &out, quiet) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code())
            }
        },
    }
}
