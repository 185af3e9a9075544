//! Batch command-line front end.
//!
//! Every subcommand reads an optional JSON config (`--config`), overlays the
//! flags given on the command line, and rejects unknown keys. The merged
//! settings are embedded in the manifest written next to each output.

mod commands;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::io;
use crate::manifest::DatasetManifest;

/// Environment variable holding the generation endpoint URL.
pub const ENDPOINT_ENV: &str = "LOWRES_MT_ENDPOINT";
/// Environment variable holding the bearer token for the endpoint.
pub const TOKEN_ENV: &str = "LOWRES_MT_TOKEN";

#[derive(Debug, Parser)]
#[command(name = "lowres-mt", version, about = "Corpus building and chrF++ evaluation for low-resource MT")]
pub struct Cli {
    /// Worker threads for data-parallel steps. Outputs do not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Read a one-sentence-per-line file into monolingual records.
    IngestMono(IngestMonoArgs),
    /// Read a TSV or two aligned files into parallel records.
    IngestParallel(IngestParallelArgs),
    /// Per-language counts, validation and tokenizer fertility.
    Stats(StatsArgs),
    /// Build a continued-pretraining corpus.
    BuildCpt(BuildCptArgs),
    /// Build an instruction-tuning mixture.
    BuildSft(BuildSftArgs),
    /// Generate cross-lingual QA records through a generation endpoint.
    SynthXqa(SynthXqaArgs),
    /// Score hypotheses with chrF++.
    Evaluate(EvaluateArgs),
    /// Render or regroup an evaluation report.
    Report(ReportArgs),
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Args, Serialize)]
pub struct IngestMonoArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lang: Option<String>,
    /// Provenance label (defaults to the input file stem).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    /// Language registry TSV replacing the bundled one.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub registry: Option<PathBuf>,
    #[arg(long, short)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct IngestParallelArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Two-column `source<TAB>target` file.
    #[arg(long, conflicts_with_all = ["src_file", "tgt_file"])]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tsv: Option<PathBuf>,
    #[arg(long, requires = "tgt_file")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub src_file: Option<PathBuf>,
    #[arg(long, requires = "src_file")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tgt_file: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub src_lang: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tgt_lang: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub registry: Option<PathBuf>,
    #[arg(long, short)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct TokenizerArgs {
    /// BPE vocabulary (`token<TAB>id` per line).
    #[arg(long, requires = "bpe_merges")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bpe_vocab: Option<PathBuf>,
    /// BPE merges (`left right` per line, in rank order).
    #[arg(long, requires = "bpe_vocab")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bpe_merges: Option<PathBuf>,
    /// Encode characters missing from the vocabulary as byte tokens.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    pub byte_fallback: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct StatsArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Monolingual JSONL (repeatable).
    #[arg(long)]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub mono: Vec<PathBuf>,
    /// Parallel JSONL (repeatable).
    #[arg(long)]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parallel: Vec<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub tokenizer: TokenizerArgs,
    /// Precomputed token counts, one JSON object per monolingual record.
    #[arg(long, conflicts_with = "bpe_vocab")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sidecar: Option<PathBuf>,
    #[arg(long, short)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct BuildCptArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub mono: Vec<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parallel: Vec<PathBuf>,
    #[arg(long, value_parser = ["all-mono", "concat", "separate"])]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategy: Option<String>,
    /// Fraction of output lines that are concatenated pairs.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parallel_ratio: Option<f64>,
    /// Sampling temperature for both monolingual and pair balancing.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    /// Output line count. Omit to keep every input once.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// How language sizes are measured for balancing.
    #[arg(long, value_parser = ["examples", "tokens"])]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
    #[arg(long, value_parser = ["jsonl", "raw"])]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub tokenizer: TokenizerArgs,
    #[arg(long, short)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct BuildSftArgs {
    /// Mixture spec: components, total, dataset sources.
    #[arg(long, alias = "config")]
    #[serde(skip)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epochs: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub registry: Option<PathBuf>,
    #[arg(long, short)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SynthXqaArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Parallel JSONL (repeatable).
    #[arg(long)]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub pairs: Vec<PathBuf>,
    /// Canned responses keyed by prompt digest, used instead of the endpoint.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mock: Option<PathBuf>,
    /// Number of pairs to sample.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Maximum in-flight requests.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub concurrency: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_retries: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timeout_ms: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_tokens: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub registry: Option<PathBuf>,
    #[arg(long, short)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EvaluateArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// JSON list of `{"lang", "hyp", "ref"}` entries.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<PathBuf>,
    /// Number of bootstrap resamples.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// `american`, `none`, or a JSON file mapping group names to languages.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub groups: Option<String>,
    #[arg(long, short)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Report JSON written by `evaluate`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    /// Recompute group averages with these groups.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub groups: Option<String>,
    #[arg(long, value_parser = ["table", "json"])]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    /// Write here instead of standard output.
    #[arg(long, short)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// Failure classes, each with its own exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Endpoint(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Endpoint(_) => 4,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Data(_) => "data",
            CliError::Endpoint(_) => "endpoint",
        }
    }

    /// One-line JSON description printed on stderr.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self.kind(), "message": self.to_string() }).to_string()
    }
}

pub(crate) fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

pub(crate) fn data_err(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

/// Overlays the flags in `args` on the config file and deserialises the result.
pub(crate) fn resolve<A: Serialize, S: DeserializeOwned>(config: Option<&Path>, args: &A) -> Result<S, CliError> {
    let mut merged = match config {
        Some(path) => {
            let bytes = std::fs::read(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            match serde_json::from_slice::<Value>(&bytes) {
                Ok(Value::Object(map)) => map,
                Ok(_) => return Err(CliError::Config(format!("{}: expected a JSON object", path.display()))),
                Err(e) => return Err(CliError::Config(format!("{}: {e}", path.display()))),
            }
        }
        None => Map::new(),
    };
    if let Value::Object(flags) = serde_json::to_value(args).map_err(config_err)? {
        merged.extend(flags);
    }
    serde_json::from_value(Value::Object(merged)).map_err(config_err)
}

/// Fails with a config error unless every path names an existing file.
pub(crate) fn require_files<'a>(paths: impl IntoIterator<Item = &'a PathBuf>) -> Result<(), CliError> {
    for p in paths {
        if !p.is_file() {
            return Err(CliError::Config(format!("{}: no such file", p.display())));
        }
    }
    Ok(())
}

/// Writes `bytes` and the manifest sidecar atomically and prints a summary.
pub(crate) fn emit(output: &Path, bytes: &[u8], manifest: &DatasetManifest, summary: &str) -> Result<(), CliError> {
    if let Some(dir) = output.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?;
    }
    let sidecar = DatasetManifest::sidecar_path(output);
    io::write_atomic(output, bytes).map_err(data_err)?;
    io::write_atomic(&sidecar, &manifest.to_json_bytes()).map_err(data_err)?;
    println!("{}: {summary} (manifest {})", output.display(), sidecar.display());
    Ok(())
}

/// Runs one parsed invocation.
pub fn execute(cli: Cli) -> Result<(), CliError> {
    let jobs = cli.jobs.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(config_err)?;
    pool.install(|| match cli.command {
        Command::IngestMono(a) => commands::ingest_mono(a),
        Command::IngestParallel(a) => commands::ingest_parallel(a),
        Command::Stats(a) => commands::stats(a),
        Command::BuildCpt(a) => commands::build_cpt(a),
        Command::BuildSft(a) => commands::build_sft(a),
        Command::SynthXqa(a) => commands::synth_xqa(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Report(a) => commands::report(a),
    })
}

/// Parses `args` and runs the command, returning the process exit status.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}

pub fn run() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    run_from(std::env::args_os())
}
