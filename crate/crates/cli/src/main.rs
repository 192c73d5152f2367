//! `shockdet` — shockable-rhythm detection pipeline driver.

use anyhow::Context;
use clap::{Parser, Subcommand};
use shockdet_core::pipeline::{self, PipelineConfig, Stage, StageStatus};
use std::path::PathBuf;
use std::process::ExitCode;

/// Exit code for usage-level mistakes (unknown plot kind, unknown stage),
/// matching clap's own convention.
const USAGE_ERROR: u8 = 2;

#[derive(Parser)]
#[command(
    name = "shockdet",
    version,
    about = "Shockable-rhythm detection from single-lead ECG",
    long_about = "Runs the detection pipeline: WFDB ingest, filtering, mode \
                  decomposition, feature extraction, KNN feature selection, \
                  and cross-validated evaluation. Stages cache their \
                  artifacts and skip recomputation when config is unchanged."
)]
struct Cli {
    /// TOML configuration file; defaults apply when omitted.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Master seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads; 0 means available parallelism. Results are
    /// independent of this value.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Keep cross-validation folds record-disjoint.
    #[arg(long, global = true)]
    group_by_record: bool,

    /// Directory holding the WFDB databases; overrides the config file.
    #[arg(long, global = true, value_name = "DIR")]
    db_dir: Option<PathBuf>,

    /// Directory for stage artifacts; overrides the config file.
    #[arg(long, global = true, value_name = "DIR")]
    cache_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan the databases, segment and label the records, split by record.
    Ingest,
    /// Run the filter chain over the ingested segments.
    Preprocess,
    /// Decompose preprocessed segments into band-grouped mode signals.
    Decompose,
    /// Extract the feature vectors from the decomposed segments.
    Features,
    /// Select the optimal feature subset on the training partition.
    Select,
    /// Evaluate the selected subset on the test partition.
    Evaluate,
    /// Run every stage in order, or a single stage with --stage.
    Run {
        /// Run only this stage (ingest, preprocess, decompose, features,
        /// select, evaluate).
        #[arg(long, value_name = "STAGE")]
        stage: Option<String>,
    },
    /// Print plot-ready CSV from cached artifacts to standard output.
    PlotData {
        /// What to emit: "ber_curve" or "trisignal".
        kind: String,
        /// trisignal: cache index of the segment to dump.
        #[arg(long, default_value_t = 0)]
        index: usize,
        /// trisignal: pick the segment by record id (needs --start).
        #[arg(long)]
        record: Option<String>,
        /// trisignal: segment start sample within the record.
        #[arg(long)]
        start: Option<usize>,
    },
}

fn load_config(cli: &Cli) -> anyhow::Result<PipelineConfig> {
    let mut config = match &cli.config {
        Some(path) => PipelineConfig::load(path)
            .with_context(|| format!("loading {}", path.display()))?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.pipeline.seed = seed;
    }
    if let Some(workers) = cli.workers {
        config.pipeline.workers = workers;
    }
    if cli.group_by_record {
        config.pipeline.group_by_record = true;
    }
    if let Some(db_dir) = &cli.db_dir {
        config.pipeline.db_dir = db_dir.clone();
    }
    if let Some(cache_dir) = &cli.cache_dir {
        config.pipeline.cache_dir = cache_dir.clone();
    }
    config.validate()?;
    Ok(config)
}

fn status_line(stage: Stage, status: StageStatus) -> String {
    let verb = match status {
        StageStatus::CacheHit => "cache hit",
        StageStatus::Computed => "computed",
        StageStatus::Recomputed => "recomputed (stale cache)",
    };
    format!("{}: {}", stage.name(), verb)
}

fn run_one(config: &PipelineConfig, stage: Stage) -> anyhow::Result<()> {
    let status = pipeline::run_stage(config, stage)?;
    println!("{}", status_line(stage, status));
    Ok(())
}

fn real_main() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let config = load_config(&cli)?;
    if config.pipeline.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.pipeline.workers)
            .build_global()
            .context("configuring the worker pool")?;
    }
    match &cli.command {
        Command::Ingest => run_one(&config, Stage::Ingest)?,
        Command::Preprocess => run_one(&config, Stage::Preprocess)?,
        Command::Decompose => run_one(&config, Stage::Decompose)?,
        Command::Features => run_one(&config, Stage::Features)?,
        Command::Select => run_one(&config, Stage::Select)?,
        Command::Evaluate => run_one(&config, Stage::Evaluate)?,
        Command::Run { stage: Some(name) } => {
            let Some(stage) = Stage::parse(name) else {
                eprintln!(
                    "error: unknown stage `{name}` (expected one of: ingest, \
                     preprocess, decompose, features, select, evaluate)"
                );
                return Ok(ExitCode::from(USAGE_ERROR));
            };
            run_one(&config, stage)?;
        }
        Command::Run { stage: None } => {
            for (stage, status) in pipeline::run(&config)? {
                println!("{}", status_line(stage, status));
            }
            println!(
                "report: {}",
                config.pipeline.cache_dir.join("report.md").display()
            );
        }
        Command::PlotData { kind, index, record, start } => {
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            match kind.as_str() {
                "ber_curve" => pipeline::plot_ber_curve(&config, &mut out)?,
                "trisignal" => {
                    let by_record = match (record, start) {
                        (Some(id), Some(s)) => Some((id.as_str(), *s)),
                        (None, None) => None,
                        _ => {
                            eprintln!("error: --record and --start go together");
                            return Ok(ExitCode::from(USAGE_ERROR));
                        }
                    };
                    pipeline::plot_trisignal(&config, *index, by_record, &mut out)?;
                }
                other => {
                    eprintln!(
                        "error: unknown plot kind `{other}` (expected \
                         ber_curve or trisignal)"
                    );
                    return Ok(ExitCode::from(USAGE_ERROR));
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
