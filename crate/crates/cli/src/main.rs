mod config;
mod error;
mod runner;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{ModeChoice, RunConfig};
use error::CliError;

#[derive(Parser)]
#[command(name = "vlogscreen", version, about = "Corpus analytics pipeline for spoken-video transcripts")]
struct Cli {
    /// Config file (TOML); defaults apply when omitted
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Preprocessing pipeline(s) to run
    #[arg(long, global = true)]
    mode: Option<ModeChoice>,
    /// RNG seed for layout and topic inference
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (run directory for single stages)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse the corpus and write the ingest summary
    Ingest,
    /// Run the preprocessing pipeline(s) over an ingested corpus
    Preprocess,
    /// Screen preprocessed tokens against the disease lexicon
    Lexicon,
    /// Rank TF-IDF n-grams and render word clouds
    Ngrams,
    /// Fit LDA models, sweep K, and write topic artifacts
    Topics,
    /// Execute every stage into a fresh versioned run directory
    Run,
    /// Summarize a completed run directory
    Report,
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    config.apply_overrides(cli.mode, cli.seed, cli.out.clone());
    Ok(config)
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let config = load_config(cli)?;
    match &cli.command {
        Command::Report => {
            print!("{}", runner::cmd_report(&config.output_dir)?);
            return Ok(());
        }
        Command::Run => {
            config.validate()?;
            let (run_dir, manifest) = runner::cmd_run(&config)?;
            println!("run {} complete: {}", manifest.run_id, run_dir.display());
            return Ok(());
        }
        _ => {}
    }

    let stage = match &cli.command {
        Command::Ingest => "ingest",
        Command::Preprocess => "preprocess",
        Command::Lexicon => "lexicon",
        Command::Ngrams => "ngrams",
        Command::Topics => "topics",
        _ => unreachable!(),
    };
    if stage == "ingest" {
        config.validate()?;
    }
    let outputs = runner::run_stage(stage, &config, &config.output_dir)?;
    for path in outputs {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
