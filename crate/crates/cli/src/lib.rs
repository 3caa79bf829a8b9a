//! Command-line pipeline: ingest, analyze, run-model, audit-predictions and
//! compare-reports over a shared key-value configuration.

pub mod cache;
pub mod commands;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use crprobe::config::{ModelKind, RunConfig};
use crprobe::{Error, Result};

/// Environment variable capping the number of worker threads.
pub const WORKERS_ENV: &str = "CRPROBE_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "crprobe", version, about = "Hop-level collaborative relation analysis")]
pub struct Cli {
    /// Configuration file (`key = value` lines).
    #[arg(short, long, global = true)]
    pub config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set k=20`. Repeatable.
    #[arg(short = 's', long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,
    /// Log progress to standard error.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse, filter and split the input; build the cached graph.
    Ingest,
    /// Relation histograms and test-sample partitions.
    Analyze,
    /// Train built-in models, write predictions and sliced metrics.
    RunModel {
        /// Model to run (item-knn, sknn, bpr-mf); defaults to `models`.
        #[arg(short, long)]
        model: Vec<String>,
    },
    /// Audit an external prediction file.
    AuditPredictions {
        /// Lines of `sample_id<TAB>item,item,...`.
        #[arg(short, long)]
        predictions: PathBuf,
        /// Name used for the output directory and report.
        #[arg(short, long, default_value = "external")]
        name: String,
    },
    /// Combine metrics reports into one ranked table.
    CompareReports {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        /// Output directory; defaults to `<out_dir>/comparison`.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

pub fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    for o in &cli.overrides {
        cfg.apply_override(o)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Thread count from the config and the environment cap; 0 means one per
/// core.
pub fn worker_count(cfg: &RunConfig) -> Result<usize> {
    let env = match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("{WORKERS_ENV}: cannot parse {v:?}")))?,
        Err(_) => 0,
    };
    Ok(match (cfg.workers, env) {
        (0, e) => e,
        (w, 0) => w,
        (w, e) => w.min(e),
    })
}

pub fn run(cli: &Cli) -> Result<()> {
    let cfg = load_config(cli)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count(&cfg)?)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(&cfg, &cli.command))
}

fn dispatch(cfg: &RunConfig, command: &Command) -> Result<()> {
    match command {
        Command::Ingest => commands::ingest(cfg).map(drop),
        Command::Analyze => commands::analyze(cfg).map(drop),
        Command::RunModel { model } => {
            let models = if model.is_empty() {
                cfg.models.clone()
            } else {
                model
                    .iter()
                    .map(|m| m.parse())
                    .collect::<Result<Vec<ModelKind>>>()?
            };
            commands::run_models(cfg, &models).map(drop)
        }
        Command::AuditPredictions { predictions, name } => {
            commands::audit_predictions(cfg, predictions, name).map(drop)
        }
        Command::CompareReports { reports, out } => {
            let out = out.clone().unwrap_or_else(|| cfg.out_dir.join("comparison"));
            commands::compare(reports, &out)
        }
    }
}
