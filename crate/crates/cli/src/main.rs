//! `leafcollage`: build leaf banks, generate collage datasets, score
//! predictions, and preview scenes.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use commands::Context;
use config::{overlay, ConfigFile, EvaluateArgs, GenerateArgs, IngestArgs, InspectArgs, SharedArgs};

#[derive(Parser)]
#[command(name = "leafcollage", version, about = "Synthetic leaf-collage datasets for leaf instance segmentation")]
struct Cli {
    /// TOML config file; flags override its values field by field
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    shared: SharedArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a leaf bank from annotated source images
    Ingest(IngestArgs),
    /// Generate a collage dataset from a leaf bank
    Generate(GenerateArgs),
    /// Score predicted label masks against ground truth
    Evaluate(EvaluateArgs),
    /// Render a label-boundary overlay for one scene
    Inspect(InspectArgs),
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let ctx = Context {
        config: cli.config.as_deref(),
        shared: file.shared(&cli.shared),
    };
    match &cli.command {
        Command::Ingest(a) => commands::ingest(&ctx, overlay(file.ingest.as_ref(), a)?),
        Command::Generate(a) => commands::generate(&ctx, overlay(file.generate.as_ref(), a)?),
        Command::Evaluate(a) => commands::evaluate(&ctx, overlay(file.evaluate.as_ref(), a)?),
        Command::Inspect(a) => commands::inspect(&ctx, overlay(file.inspect.as_ref(), a)?),
    }
}
