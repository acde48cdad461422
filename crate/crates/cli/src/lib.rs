//! The `glyph` command line.

use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use glyph_core::export::{sequence_graph_svg, state_graph_svg, AnalysisConfig};
use glyph_core::game::{generate_synthetic_traces, Policy};
use glyph_core::ingest::{parse_trace_log, write_trace_log};
use glyph_service::dataset::{load_level, load_levels, Dataset, PrecomputeOptions};

#[derive(Debug, Parser)]
#[command(name = "glyph", version, about = "Strategy analytics over Wuzzit Trouble play traces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic trace log from bot policies
    Gen(GenArgs),
    /// Validate a trace log and print the ingest report
    Ingest(IngestArgs),
    /// Build a dataset directory: state graphs, distance matrices and layouts
    Precompute(PrecomputeArgs),
    /// Write one artifact of a precomputed level
    Export(ExportArgs),
    /// Serve a precomputed dataset over HTTP
    Serve(ServeArgs),
}

#[derive(Debug, clap::Args)]
pub struct GenArgs {
    /// Level config file (JSON); repeat for several levels
    #[arg(long = "level", required = true)]
    pub levels: Vec<PathBuf>,
    /// Bot policy: optimal, greedy-key, one-step, random or mixed
    #[arg(long, default_value = "mixed")]
    pub policy: Policy,
    /// Traces per level
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    /// Random seed; the output depends only on the inputs and this seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct IngestArgs {
    /// Trace log (one JSON move event per line)
    #[arg(long)]
    pub traces: PathBuf,
    /// Directory of level config files
    #[arg(long)]
    pub levels: PathBuf,
    /// Print the report as JSON
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, clap::Args)]
pub struct PrecomputeArgs {
    /// Trace log (one JSON move event per line)
    #[arg(long)]
    pub traces: PathBuf,
    /// Directory of level config files
    #[arg(long)]
    pub levels: PathBuf,
    /// Dataset directory to create or replace
    #[arg(long, default_value = "dataset")]
    pub out: PathBuf,
    /// Analysis config (JSON); defaults apply to missing fields
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Layout seed for both views, overriding the config
    #[arg(long)]
    pub seed: Option<u64>,
    /// Levels analyzed in parallel; 0 picks the number of cores
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Artifact {
    /// Distance matrix as CSV
    Matrix,
    /// State graph as node-link JSON
    StateGraph,
    /// Sequence graph as JSON, with its matrix
    SequenceGraph,
    /// SVG snapshot of the state view
    StateSvg,
    /// SVG snapshot of the sequence view
    SequenceSvg,
}

#[derive(Debug, clap::Args)]
pub struct ExportArgs {
    /// Dataset directory written by precompute
    #[arg(long, default_value = "dataset")]
    pub dataset: PathBuf,
    /// Level id
    #[arg(long)]
    pub level: String,
    /// Artifact to write
    #[arg(long, value_enum)]
    pub what: Artifact,
    /// Output file; standard output when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Width and height of SVG snapshots
    #[arg(long, default_value_t = 800.0)]
    pub size: f64,
}

#[derive(Debug, clap::Args)]
pub struct ServeArgs {
    /// Dataset directory written by precompute
    #[arg(long, default_value = "dataset")]
    pub dataset: PathBuf,
    /// Address to listen on
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub bind: SocketAddr,
    /// Seconds of inactivity before a session's pins are dropped
    #[arg(long, default_value_t = 3600)]
    pub session_ttl: u64,
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn gen(args: &GenArgs) -> Result<()> {
    let mut traces = Vec::new();
    for (i, path) in args.levels.iter().enumerate() {
        let level = load_level(path)?;
        let seed = args.seed.wrapping_add(i as u64);
        traces.extend(generate_synthetic_traces(&level, args.policy, args.count, seed)?);
    }
    emit(args.out.as_deref(), &write_trace_log(&traces))
}

fn ingest(args: &IngestArgs) -> Result<()> {
    let levels = load_levels(&args.levels)?;
    let file = fs::File::open(&args.traces).with_context(|| format!("opening {}", args.traces.display()))?;
    let report = parse_trace_log(std::io::BufReader::new(file), &levels)?;
    let text = if args.json {
        let value = serde_json::json!({
            "lines_read": report.lines_read,
            "traces_accepted": report.traces.len(),
            "traces_excluded": report.excluded_traces,
            "warnings": report.warnings,
        });
        serde_json::to_string_pretty(&value)? + "\n"
    } else {
        let mut text = format!(
            "lines read: {}\ntraces accepted: {}\ntraces excluded: {}\nwarnings: {}\n",
            report.lines_read,
            report.traces.len(),
            report.excluded_traces,
            report.warnings.len()
        );
        for w in &report.warnings {
            text.push_str(&format!("  {w}\n"));
        }
        text
    };
    emit(None, &text)
}

fn precompute(args: &PrecomputeArgs) -> Result<()> {
    let mut analysis: AnalysisConfig = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => AnalysisConfig::default(),
    };
    if let Some(seed) = args.seed {
        analysis.state_layout.seed = seed;
        analysis.sequence_layout.seed = seed;
    }
    let options = PrecomputeOptions { analysis, jobs: args.jobs, dataset_id: None };
    let index = glyph_service::precompute(&args.traces, &args.levels, &args.out, &options)?;
    for level in &index.levels {
        eprintln!(
            "{}: {} traces, {} sequences, {} states",
            level.level_id, level.trace_count, level.sequence_count, level.state_count
        );
    }
    if !index.warnings.is_empty() {
        eprintln!("{} ingest warnings", index.warnings.len());
    }
    Ok(())
}

fn export(args: &ExportArgs) -> Result<()> {
    let dataset = Dataset::load(&args.dataset)?;
    let Some(data) = dataset.levels.get(&args.level) else {
        bail!("level {} is not in {}", args.level, args.dataset.display());
    };
    let text = match args.what {
        Artifact::Matrix => data
            .sequence_graph
            .matrix
            .as_ref()
            .context("dataset has no distance matrix")?
            .to_csv(),
        Artifact::StateGraph => serde_json::to_string_pretty(&data.state_graph)? + "\n",
        Artifact::SequenceGraph => serde_json::to_string_pretty(&data.sequence_graph)? + "\n",
        Artifact::StateSvg => state_graph_svg(&data.state_graph, args.size),
        Artifact::SequenceSvg => sequence_graph_svg(&data.sequence_graph, args.size),
    };
    emit(args.out.as_deref(), &text)
}

fn serve(args: &ServeArgs) -> Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(glyph_service::serve(&args.dataset, args.bind, Duration::from_secs(args.session_ttl)))?;
    Ok(())
}

impl Command {
    pub fn stage(&self) -> &'static str {
        match self {
            Command::Gen(_) => "gen",
            Command::Ingest(_) => "ingest",
            Command::Precompute(_) => "precompute",
            Command::Export(_) => "export",
            Command::Serve(_) => "serve",
        }
    }
}

/// Runs one subcommand; errors carry the stage name.
pub fn run(cli: &Cli) -> Result<()> {
    let result = match &cli.command {
        Command::Gen(a) => gen(a),
        Command::Ingest(a) => ingest(a),
        Command::Precompute(a) => precompute(a),
        Command::Export(a) => export(a),
        Command::Serve(a) => serve(a),
    };
    result.with_context(|| format!("{} failed", cli.command.stage()))
}
