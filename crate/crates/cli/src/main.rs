use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use gsmote::{Dataset, Selection};
use gsmote_cli::bench::run_config_file;
use gsmote_cli::fixture::{make_fixture, FixtureKind};
use gsmote_cli::oversample::{build_oversampler, oversample, MethodParams};

#[derive(Parser)]
#[command(name = "gsmote", version, about = "G-SMOTE oversampling and benchmark runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the cross-validation benchmark described by a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `workers` in the config.
        #[arg(long)]
        workers: Option<usize>,
        /// Skip cells already recorded in the output directory's journal.
        #[arg(long)]
        resume: bool,
    },
    /// Write a synthetic two-feature dataset as CSV.
    Fixture {
        #[arg(long)]
        kind: FixtureKind,
        /// Imbalance ratio, majority count over minority count.
        #[arg(long)]
        ir: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Fraction of minority labels exchanged with majority labels.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
    },
    /// Balance one dataset and write original plus synthetic rows.
    Oversample {
        #[arg(long)]
        data: PathBuf,
        /// One of none, random, smote, borderline1, borderline2, adasyn, gsmote.
        #[arg(long)]
        method: String,
        /// Defaults to the last column.
        #[arg(long)]
        label_column: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, allow_negative_numbers = true)]
        truncation: Option<f64>,
        #[arg(long)]
        deformation: Option<f64>,
        #[arg(long)]
        selection: Option<Selection>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, workers, resume } => {
            let summary = run_config_file(&config, workers, resume)?;
            log::info!(
                "{} cells ({} run, {} resumed), {} fallback events; results in {}",
                summary.cells_total,
                summary.cells_run,
                summary.cells_resumed,
                summary.fallbacks,
                summary.output_dir.display()
            );
        }
        Command::Fixture { kind, ir, n, seed, out, noise } => {
            let data = make_fixture(kind, ir, n, seed, noise)?;
            let file = File::create(&out).with_context(|| format!("cannot write {}", out.display()))?;
            data.write_csv(BufWriter::new(file))?;
            log::info!(
                "wrote {} ({} majority, {} minority)",
                out.display(),
                data.majority_count(),
                data.minority_count()
            );
        }
        Command::Oversample {
            data,
            method,
            label_column,
            k,
            truncation,
            deformation,
            selection,
            seed,
            out,
        } => {
            let oversampler = build_oversampler(&method, &MethodParams { k, truncation, deformation, selection })?;
            let dataset = Dataset::load_csv(&data, label_column.as_deref())
                .with_context(|| format!("cannot load dataset {}", data.display()))?;
            let file = File::create(&out).with_context(|| format!("cannot write {}", out.display()))?;
            let summary = oversample(&dataset, &oversampler, seed, BufWriter::new(file))?;
            if let Some(kind) = &summary.fallback {
                log::warn!("{method} fell back: {kind}");
            }
            log::info!(
                "wrote {} ({} original, {} synthetic rows)",
                out.display(),
                summary.original,
                summary.synthetic
            );
        }
    }
    Ok(())
}
