use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use csem_core::pipeline::{run_all, run_stage, PipelineConfig, Stage, StageOptions, StageOutcome};
use csem_core::CsemError;

const EXIT_VALIDATION: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "csem",
    version,
    about = "Synthetic chart corpora, text-to-chart benchmarks and dual-encoder retrieval"
)]
struct Cli {
    /// TOML config file; missing keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of synthetic tables; overrides the config.
    #[arg(long, global = true)]
    tables: Option<usize>,
    /// Output directory; overrides the config.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Validate inputs without writing anything.
    #[arg(long, global = true)]
    dry_run: bool,
    /// Worker thread cap.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate tables, charts and SVGs.
    Synth,
    /// Attach three insight levels to every chart.
    Insights,
    /// Train the dual encoder on charts outside the benchmark pool.
    Train,
    /// Embed the benchmark pool.
    Embed {
        /// Use the embedding service from CSEM_EMBED_URL.
        #[arg(long)]
        remote: bool,
    },
    /// Validate the embeddings and write the index manifest.
    Index,
    /// Group charts into target/distractor candidates.
    BenchBuild,
    /// Generate queries, collect votes and settle groups.
    Queries,
    /// Evaluate retrieval over the benchmark.
    Eval {
        /// Embed queries with the embedding service from CSEM_EMBED_URL.
        #[arg(long)]
        remote: bool,
    },
    /// Train and evaluate every insight-level subset.
    Ablation,
    /// Compare text-to-chart with text-to-OCR retrieval.
    OcrEval,
    /// Compare direct-resize and center-crop training.
    PreprocessCompare,
    /// Run synth through eval.
    All,
}

fn config(cli: &Cli) -> Result<PipelineConfig, CsemError> {
    let mut cfg = match &cli.config {
        Some(path) => PipelineConfig::from_file(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(tables) = cli.tables {
        cfg.tables = tables;
    }
    if let Some(output) = &cli.output {
        cfg.output = output.clone();
    }
    if cli.jobs.is_some() {
        cfg.jobs = cli.jobs;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<StageOutcome, CsemError> {
    let cfg = config(cli)?;
    if let Some(n) = cfg.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CsemError::InvalidArgument(format!("--jobs: {e}")))?;
    }
    let mut opts = StageOptions { dry_run: cli.dry_run, remote: false };
    let stage = match cli.command {
        Command::All => return run_all(&cfg, opts),
        Command::Synth => Stage::Synth,
        Command::Insights => Stage::Insights,
        Command::Train => Stage::Train,
        Command::Embed { remote } => {
            opts.remote = remote;
            Stage::Embed
        }
        Command::Index => Stage::Index,
        Command::BenchBuild => Stage::BenchBuild,
        Command::Queries => Stage::Queries,
        Command::Eval { remote } => {
            opts.remote = remote;
            Stage::Eval
        }
        Command::Ablation => Stage::Ablation,
        Command::OcrEval => Stage::OcrEval,
        Command::PreprocessCompare => Stage::PreprocessCompare,
    };
    run_stage(stage, &cfg, opts)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            for line in &outcome.summary {
                println!("{line}");
            }
            if cli.dry_run {
                println!("dry run: nothing written");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { EXIT_VALIDATION } else { EXIT_IO })
        }
    }
}
