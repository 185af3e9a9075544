use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{
    config_err, data_err, emit, require_files, resolve, BuildCptArgs, BuildSftArgs, CliError, EvaluateArgs,
    IngestMonoArgs, IngestParallelArgs, ReportArgs, StatsArgs, SynthXqaArgs, ENDPOINT_ENV, TOKEN_ENV,
};
use crate::corpus::{
    compute_stats, ingest_mono as read_mono, ingest_parallel as read_parallel, validate, CorpusError, LanguageRegistry,
    MonoRecord, ParallelRecord, ParallelSource,
};
use crate::cpt::{self, CptError, MixStrategy, Mixer, MixerConfig, DEFAULT_CPT_TAU};
use crate::eval::{self, american_groups, ChrfParams, EvalError, EvalReport, Groups};
use crate::io;
use crate::manifest::{DatasetManifest, Strategy};
use crate::sampling::{SamplingError, SizeUnit};
use crate::sft::{self, KeyMapping, MixtureComponent, MixtureSpec, SftError, SftRecord, Task, TemplateMode, DEFAULT_SFT_TAU};
use crate::tokenize::{fertility, fertility_with_counts, read_sidecar, BpeModel, TokenCounter, WhitespaceCounter};
use crate::xqa::{
    self, GenerationClient, GenerationParams, HttpClient, MockClient, RetryPolicy, XqaConfig, XqaError,
    DEFAULT_ANSWER_SUFFIX,
};

fn registry(path: Option<&Path>) -> Result<LanguageRegistry, CliError> {
    match path {
        Some(p) => LanguageRegistry::load(p).map_err(config_err),
        None => Ok(LanguageRegistry::bundled()),
    }
}

fn known_lang(reg: &LanguageRegistry, code: &str) -> Result<(), CliError> {
    reg.name(code).map(|_| ()).map_err(config_err)
}

fn corpus_err(e: CorpusError) -> CliError {
    match e {
        CorpusError::Language(_) | CorpusError::SameLanguage(_) => config_err(e),
        _ => data_err(e),
    }
}

fn default_source(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn with_inputs(manifest: &mut DatasetManifest, inputs: &[&PathBuf]) -> Result<(), CliError> {
    for p in inputs {
        manifest.add_input(p).map_err(data_err)?;
    }
    Ok(())
}

fn settings_value<S: Serialize>(settings: &S) -> serde_json::Value {
    serde_json::to_value(settings).expect("settings serialise")
}

fn read_mono_jsonl(paths: &[PathBuf]) -> Result<Vec<MonoRecord>, CliError> {
    let mut out = Vec::new();
    for p in paths {
        out.extend(io::read_jsonl::<MonoRecord>(p).map_err(data_err)?);
    }
    Ok(out)
}

fn read_parallel_jsonl(paths: &[PathBuf]) -> Result<Vec<ParallelRecord>, CliError> {
    let mut out = Vec::new();
    for p in paths {
        out.extend(io::read_jsonl::<ParallelRecord>(p).map_err(data_err)?);
    }
    Ok(out)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IngestMonoSettings {
    input: PathBuf,
    lang: String,
    #[serde(default)]
    source: Option<String>,
    #[serde(default)]
    registry: Option<PathBuf>,
    output: PathBuf,
}

pub(super) fn ingest_mono(args: IngestMonoArgs) -> Result<(), CliError> {
    let s: IngestMonoSettings = resolve(args.config.as_deref(), &args)?;
    require_files([&s.input])?;
    known_lang(&registry(s.registry.as_deref())?, &s.lang)?;
    let source = s.source.clone().unwrap_or_else(|| default_source(&s.input));
    let ingested = read_mono(&s.input, &s.lang, &source).map_err(corpus_err)?;

    let mut m = DatasetManifest::new(Strategy::IngestMono, 0, &s);
    with_inputs(&mut m, &[&s.input])?;
    m.record_count = ingested.records.len() as u64;
    m.bump(format!("lang:{}", s.lang), m.record_count);
    m.skipped.insert("blank".into(), ingested.blank_skipped as u64);
    let summary = format!("{} records, {} blank lines skipped", m.record_count, ingested.blank_skipped);
    emit(&s.output, &io::to_jsonl(&ingested.records), &m, &summary)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IngestParallelSettings {
    #[serde(default)]
    tsv: Option<PathBuf>,
    #[serde(default)]
    src_file: Option<PathBuf>,
    #[serde(default)]
    tgt_file: Option<PathBuf>,
    src_lang: String,
    tgt_lang: String,
    #[serde(default)]
    source: Option<String>,
    #[serde(default)]
    registry: Option<PathBuf>,
    output: PathBuf,
}

pub(super) fn ingest_parallel(args: IngestParallelArgs) -> Result<(), CliError> {
    let s: IngestParallelSettings = resolve(args.config.as_deref(), &args)?;
    let (input, files): (ParallelSource<'_>, Vec<&PathBuf>) = match (&s.tsv, &s.src_file, &s.tgt_file) {
        (Some(t), None, None) => (ParallelSource::Tsv(t), vec![t]),
        (None, Some(a), Some(b)) => (ParallelSource::Aligned { src: a, tgt: b }, vec![a, b]),
        _ => return Err(CliError::Config("give either tsv or both src_file and tgt_file".into())),
    };
    require_files(files.iter().copied())?;
    let reg = registry(s.registry.as_deref())?;
    known_lang(&reg, &s.src_lang)?;
    known_lang(&reg, &s.tgt_lang)?;
    let source = s.source.clone().unwrap_or_else(|| default_source(files[0]));
    let ingested = read_parallel(input, &s.src_lang, &s.tgt_lang, &source).map_err(corpus_err)?;

    let mut m = DatasetManifest::new(Strategy::IngestParallel, 0, &s);
    with_inputs(&mut m, &files)?;
    m.record_count = ingested.records.len() as u64;
    m.bump(format!("pair:{}-{}", s.src_lang, s.tgt_lang), m.record_count);
    m.skipped.insert("blank".into(), ingested.blank_skipped as u64);
    let summary = format!("{} pairs, {} blank pairs skipped", m.record_count, ingested.blank_skipped);
    emit(&s.output, &io::to_jsonl(&ingested.records), &m, &summary)
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TokenizerSettings {
    #[serde(default)]
    bpe_vocab: Option<PathBuf>,
    #[serde(default)]
    bpe_merges: Option<PathBuf>,
    #[serde(default)]
    byte_fallback: bool,
}

impl TokenizerSettings {
    fn files(&self) -> Vec<&PathBuf> {
        self.bpe_vocab.iter().chain(&self.bpe_merges).collect()
    }

    fn load(&self) -> Result<Option<BpeModel>, CliError> {
        match (&self.bpe_vocab, &self.bpe_merges) {
            (Some(v), Some(m)) => Ok(Some(BpeModel::load(v, m, self.byte_fallback).map_err(config_err)?)),
            (None, None) => Ok(None),
            _ => Err(CliError::Config("bpe_vocab and bpe_merges go together".into())),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StatsSettings {
    #[serde(default)]
    mono: Vec<PathBuf>,
    #[serde(default)]
    parallel: Vec<PathBuf>,
    #[serde(default)]
    bpe_vocab: Option<PathBuf>,
    #[serde(default)]
    bpe_merges: Option<PathBuf>,
    #[serde(default)]
    byte_fallback: bool,
    #[serde(default)]
    sidecar: Option<PathBuf>,
    output: PathBuf,
}

#[derive(Serialize)]
struct StatsOutput {
    counter: String,
    stats: crate::corpus::CorpusStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    fertility: Option<crate::tokenize::FertilityReport>,
    validation: BTreeMap<&'static str, crate::corpus::ValidationReport>,
}

pub(super) fn stats(args: StatsArgs) -> Result<(), CliError> {
    let s: StatsSettings = resolve(args.config.as_deref(), &args)?;
    let tok = TokenizerSettings {
        bpe_vocab: s.bpe_vocab.clone(),
        bpe_merges: s.bpe_merges.clone(),
        byte_fallback: s.byte_fallback,
    };
    let mut inputs: Vec<&PathBuf> = s.mono.iter().chain(&s.parallel).collect();
    inputs.extend(tok.files());
    inputs.extend(&s.sidecar);
    if s.mono.is_empty() && s.parallel.is_empty() {
        return Err(CliError::Config("stats needs at least one mono or parallel input".into()));
    }
    require_files(inputs.iter().copied())?;
    let bpe = tok.load()?;
    let counter: &dyn TokenCounter = match &bpe {
        Some(b) => b,
        None => &WhitespaceCounter,
    };

    let mono = read_mono_jsonl(&s.mono)?;
    let parallel = read_parallel_jsonl(&s.parallel)?;
    let token_counter = bpe.as_ref().map(|b| b as &dyn TokenCounter);
    let stats = compute_stats(&mono, token_counter).map_err(data_err)?
        + compute_stats(&parallel, token_counter).map_err(data_err)?;
    let fert = if mono.is_empty() {
        None
    } else if let Some(path) = &s.sidecar {
        let counts = read_sidecar(path).map_err(data_err)?;
        Some(fertility_with_counts(&mono, &counts).map_err(data_err)?)
    } else {
        Some(fertility(&mono, counter).map_err(data_err)?)
    };
    let mut validation = BTreeMap::new();
    validation.insert("mono", validate(&mono));
    validation.insert("parallel", validate(&parallel));
    let out = StatsOutput {
        counter: if s.sidecar.is_some() { "sidecar".into() } else { counter.name().to_string() },
        stats,
        fertility: fert,
        validation,
    };

    let mut m = DatasetManifest::new(Strategy::Stats, 0, &s);
    with_inputs(&mut m, &inputs)?;
    m.record_count = (mono.len() + parallel.len()) as u64;
    m.bump("mono", mono.len() as u64);
    m.bump("parallel", parallel.len() as u64);
    let duplicates = out.validation.values().map(|v| v.duplicates).sum::<usize>();
    let violations = out.validation.values().map(|v| v.violations.len()).sum::<usize>();
    let mut bytes = serde_json::to_vec_pretty(&out).map_err(data_err)?;
    bytes.push(b'\n');
    let summary = format!(
        "{} languages, {} records, {duplicates} duplicates, {violations} violations",
        out.stats.per_language.len(),
        m.record_count
    );
    emit(&s.output, &bytes, &m, &summary)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum CptStrategy {
    AllMono,
    Concat,
    Separate,
}

impl From<CptStrategy> for MixStrategy {
    fn from(s: CptStrategy) -> Self {
        match s {
            CptStrategy::AllMono => MixStrategy::AllMono,
            CptStrategy::Concat => MixStrategy::MonoParallelConcat,
            CptStrategy::Separate => MixStrategy::MonoParallelSeparate,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum CptFormat {
    #[default]
    Jsonl,
    Raw,
}

fn cpt_tau() -> f64 {
    DEFAULT_CPT_TAU
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BuildCptSettings {
    #[serde(default)]
    mono: Vec<PathBuf>,
    #[serde(default)]
    parallel: Vec<PathBuf>,
    strategy: CptStrategy,
    #[serde(default)]
    parallel_ratio: f64,
    #[serde(default = "cpt_tau")]
    tau: f64,
    /// Overrides `tau` for monolingual balancing.
    #[serde(default)]
    mono_tau: Option<f64>,
    /// Overrides `tau` for pair balancing.
    #[serde(default)]
    parallel_tau: Option<f64>,
    #[serde(default)]
    size: Option<usize>,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    unit: SizeUnit,
    #[serde(default)]
    format: CptFormat,
    #[serde(default)]
    bpe_vocab: Option<PathBuf>,
    #[serde(default)]
    bpe_merges: Option<PathBuf>,
    #[serde(default)]
    byte_fallback: bool,
    output: PathBuf,
}

fn cpt_err(e: CptError) -> CliError {
    match e {
        CptError::InvalidRatio(_) | CptError::WrongStrategy { .. } => config_err(e),
        CptError::Sampling(SamplingError::InvalidTau(_)) => config_err(e),
        _ => data_err(e),
    }
}

pub(super) fn build_cpt(args: BuildCptArgs) -> Result<(), CliError> {
    let s: BuildCptSettings = resolve(args.config.as_deref(), &args)?;
    let tok = TokenizerSettings {
        bpe_vocab: s.bpe_vocab.clone(),
        bpe_merges: s.bpe_merges.clone(),
        byte_fallback: s.byte_fallback,
    };
    let mut inputs: Vec<&PathBuf> = s.mono.iter().chain(&s.parallel).collect();
    inputs.extend(tok.files());
    require_files(inputs.iter().copied())?;
    let bpe = tok.load()?;
    let counter: &dyn TokenCounter = match &bpe {
        Some(b) => b,
        None => &WhitespaceCounter,
    };

    let mono = read_mono_jsonl(&s.mono)?;
    let parallel = read_parallel_jsonl(&s.parallel)?;
    let mut config = MixerConfig::new(s.strategy.into(), s.size, s.seed).with_ratio(s.parallel_ratio);
    config.mono_tau = s.mono_tau.unwrap_or(s.tau);
    config.parallel_tau = s.parallel_tau.unwrap_or(s.tau);
    config.unit = s.unit;
    let built = Mixer::new(config).with_counter(counter).build(&mono, &parallel).map_err(cpt_err)?;

    let mut m = built.manifest;
    m.set_config(settings_value(&s));
    with_inputs(&mut m, &inputs)?;
    for w in &m.warnings {
        log::warn!("{w}");
    }
    let bytes = match s.format {
        CptFormat::Jsonl => io::to_jsonl(&built.sequences),
        CptFormat::Raw => cpt::to_raw_text(&built.sequences),
    };
    let concat = m.counts.get("origin:parallel_concat").copied().unwrap_or(0);
    let summary = format!("{} sequences, {concat} concatenated pairs", built.sequences.len());
    emit(&s.output, &bytes, &m, &summary)
}

fn default_general_task() -> Task {
    Task::General
}

/// Where the records of one named mixture dataset come from.
#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum DatasetSource {
    /// Parallel JSONL rendered into MT instructions, temperature-balanced across directions.
    Mt {
        inputs: Vec<PathBuf>,
        #[serde(default)]
        templates: TemplateMode,
    },
    /// Ready-made instruction records (e.g. `synth-xqa` output).
    Sft { path: PathBuf },
    /// Third-party instruction data with its own key names.
    General {
        path: PathBuf,
        #[serde(default)]
        mapping: Option<KeyMapping>,
        #[serde(default = "default_general_task")]
        task: Task,
        #[serde(default)]
        lang: Option<String>,
    },
}

impl DatasetSource {
    fn files(&self) -> Vec<&PathBuf> {
        match self {
            DatasetSource::Mt { inputs, .. } => inputs.iter().collect(),
            DatasetSource::Sft { path } | DatasetSource::General { path, .. } => vec![path],
        }
    }
}

fn sft_tau() -> f64 {
    DEFAULT_SFT_TAU
}

fn one() -> usize {
    1
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BuildSftSettings {
    components: Vec<MixtureComponent>,
    total: usize,
    #[serde(default = "one")]
    epochs: usize,
    #[serde(default)]
    seed: u64,
    #[serde(default = "sft_tau")]
    tau: f64,
    datasets: BTreeMap<String, DatasetSource>,
    #[serde(default)]
    registry: Option<PathBuf>,
    output: PathBuf,
}

fn sft_err(e: SftError) -> CliError {
    match e {
        SftError::Shortfall { .. } | SftError::Io(_) | SftError::Schema { .. } | SftError::InvalidRecord { .. } => {
            data_err(e)
        }
        _ => config_err(e),
    }
}

pub(super) fn build_sft(args: BuildSftArgs) -> Result<(), CliError> {
    let s: BuildSftSettings = resolve(args.spec.as_deref(), &args)?;
    let spec = MixtureSpec {
        components: s.components.clone(),
        total: s.total,
        epochs: s.epochs,
        seed: s.seed,
    };
    let counts = spec.resolve_counts().map_err(sft_err)?;
    for c in &spec.components {
        if !s.datasets.contains_key(&c.dataset) {
            return Err(sft_err(SftError::UnknownDataset(c.dataset.clone())));
        }
    }
    let inputs: Vec<&PathBuf> = s.datasets.values().flat_map(DatasetSource::files).collect();
    require_files(inputs.iter().copied())?;
    let reg = registry(s.registry.as_deref())?;

    let mut datasets = BTreeMap::new();
    for (name, source) in &s.datasets {
        let records = match source {
            DatasetSource::Mt { inputs, templates } => {
                let needed: usize = spec
                    .components
                    .iter()
                    .zip(&counts)
                    .filter(|(c, _)| &c.dataset == name && c.task == Task::Mt)
                    .map(|(_, n)| n)
                    .sum();
                let pairs = read_parallel_jsonl(inputs)?;
                if pairs.len() < needed {
                    return Err(sft_err(SftError::Shortfall {
                        component: name.clone(),
                        requested: needed,
                        available: pairs.len(),
                        deficit: needed - pairs.len(),
                    }));
                }
                let seed = crate::seed::derive_seed(s.seed, &format!("sft/dataset/{name}"));
                let chosen = sft::sample_mt_pairs(&pairs, s.tau, needed, seed).map_err(sft_err)?;
                sft::build_mt_dataset(&chosen, &sft::standard_templates(), *templates, seed, &reg).map_err(sft_err)?
            }
            DatasetSource::Sft { path } => {
                let records: Vec<SftRecord> = io::read_jsonl(path).map_err(data_err)?;
                for (i, r) in records.iter().enumerate() {
                    r.check()
                        .map_err(|msg| CliError::Data(format!("{}: record {}: {msg}", path.display(), i + 1)))?;
                }
                records
            }
            DatasetSource::General {
                path,
                mapping,
                task,
                lang,
            } => sft::ingest_general(path, &mapping.clone().unwrap_or_default(), *task, lang.as_deref())
                .map_err(sft_err)?,
        };
        datasets.insert(name.clone(), records);
    }

    let (records, mut m) = sft::compose_mixture(&spec, &datasets).map_err(sft_err)?;
    m.set_config(settings_value(&s));
    with_inputs(&mut m, &inputs)?;
    let summary = m
        .counts
        .iter()
        .filter(|(k, _)| !k.contains(':'))
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(", ");
    emit(&s.output, &io::to_jsonl(&records), &m, &format!("{} records ({summary})", records.len()))
}

fn default_concurrency() -> usize {
    XqaConfig::default().concurrency
}

fn default_suffix() -> String {
    DEFAULT_ANSWER_SUFFIX.to_string()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SynthXqaSettings {
    pairs: Vec<PathBuf>,
    #[serde(default)]
    mock: Option<PathBuf>,
    #[serde(default)]
    limit: Option<usize>,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_concurrency")]
    concurrency: usize,
    #[serde(default)]
    max_retries: Option<u32>,
    #[serde(default)]
    timeout_ms: Option<u64>,
    #[serde(default)]
    temperature: Option<f64>,
    #[serde(default)]
    max_tokens: Option<u32>,
    #[serde(default = "default_suffix")]
    answer_suffix: String,
    #[serde(default)]
    registry: Option<PathBuf>,
    output: PathBuf,
}

pub(super) fn synth_xqa(args: SynthXqaArgs) -> Result<(), CliError> {
    let s: SynthXqaSettings = resolve(args.config.as_deref(), &args)?;
    let mut inputs: Vec<&PathBuf> = s.pairs.iter().collect();
    inputs.extend(&s.mock);
    require_files(inputs.iter().copied())?;
    let reg = registry(s.registry.as_deref())?;

    let client: Box<dyn GenerationClient> = match &s.mock {
        Some(path) => Box::new(MockClient::load(path).map_err(data_err)?),
        None => {
            let url = std::env::var(ENDPOINT_ENV)
                .map_err(|_| CliError::Config(format!("set {ENDPOINT_ENV} or pass --mock")))?;
            let mut retry = RetryPolicy::default();
            if let Some(n) = s.max_retries {
                retry.max_retries = n;
            }
            if let Some(t) = s.timeout_ms {
                retry.timeout_ms = t;
            }
            Box::new(HttpClient::new(url, std::env::var(TOKEN_ENV).ok(), retry))
        }
    };
    let mut params = GenerationParams::default();
    if let Some(t) = s.temperature {
        params.temperature = t;
    }
    if let Some(n) = s.max_tokens {
        params.max_tokens = n;
    }
    let config = XqaConfig {
        limit: s.limit,
        seed: s.seed,
        concurrency: s.concurrency,
        params,
        answer_suffix: s.answer_suffix.clone(),
    };

    let pairs = read_parallel_jsonl(&s.pairs)?;
    let (records, mut m) = xqa::build_xqa_dataset(&pairs, client.as_ref(), &config, &reg).map_err(|e| match e {
        XqaError::Endpoint { .. } => CliError::Endpoint(e.to_string()),
        XqaError::Registry(_) => config_err(e),
        _ => data_err(e),
    })?;
    let generator = m.notes.get("generator").cloned();
    let mut effective = settings_value(&s);
    effective["generator"] = generator.into();
    m.set_config(effective);
    with_inputs(&mut m, &inputs)?;
    let skipped: u64 = m.skipped.values().sum();
    emit(
        &s.output,
        &io::to_jsonl(&records),
        &m,
        &format!("{} records, {skipped} skipped", records.len()),
    )
}

/// A preset name (`american`, `none`), a path to a JSON file, or inline groups.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum GroupSpec {
    Named(String),
    Inline(Groups),
}

impl Default for GroupSpec {
    fn default() -> Self {
        GroupSpec::Named("none".into())
    }
}

impl GroupSpec {
    fn file(&self) -> Option<PathBuf> {
        match self {
            GroupSpec::Named(n) if n != "american" && n != "none" => Some(PathBuf::from(n)),
            _ => None,
        }
    }

    fn resolve(&self) -> Result<Groups, CliError> {
        match self {
            GroupSpec::Inline(g) => Ok(g.clone()),
            GroupSpec::Named(n) if n == "american" => Ok(american_groups()),
            GroupSpec::Named(n) if n == "none" => Ok(Groups::new()),
            GroupSpec::Named(path) => {
                let bytes = std::fs::read(path).map_err(|e| CliError::Config(format!("{path}: {e}")))?;
                serde_json::from_slice(&bytes).map_err(|e| CliError::Config(format!("{path}: {e}")))
            }
        }
    }
}

fn eval_err(e: EvalError) -> CliError {
    match e {
        EvalError::InvalidParams(_)
        | EvalError::NoResamples
        | EvalError::MissingGroupLanguage { .. }
        | EvalError::OverlappingGroups { .. }
        | EvalError::DuplicateLanguage(_)
        | EvalError::Manifest { .. } => config_err(e),
        _ => data_err(e),
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EvaluateSettings {
    manifest: PathBuf,
    #[serde(default)]
    bootstrap: Option<usize>,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    groups: GroupSpec,
    #[serde(default)]
    chrf: ChrfParams,
    output: PathBuf,
}

pub(super) fn evaluate(args: EvaluateArgs) -> Result<(), CliError> {
    let s: EvaluateSettings = resolve(args.config.as_deref(), &args)?;
    let group_file = s.groups.file();
    require_files([&s.manifest].into_iter().chain(&group_file))?;
    let groups = s.groups.resolve()?;
    s.chrf.validate().map_err(eval_err)?;
    let sets = eval::load_eval_manifest(&s.manifest).map_err(eval_err)?;
    let report = eval::evaluate(&sets, &s.chrf, &groups, s.bootstrap, s.seed).map_err(eval_err)?;

    let mut m = DatasetManifest::new(Strategy::Evaluation, s.seed, &s);
    with_inputs(&mut m, &[&s.manifest])?;
    for set in &sets {
        m.bump(format!("segments:{}", set.lang), set.len() as u64);
    }
    m.record_count = report.per_language.len() as u64;
    let mut bytes = serde_json::to_vec_pretty(&report).map_err(data_err)?;
    bytes.push(b'\n');
    let summary = format!(
        "{} languages, macro chrF++ {:.2}",
        report.per_language.len(),
        report.macro_average
    );
    emit(&s.output, &bytes, &m, &summary)
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ReportFormat {
    #[default]
    Table,
    Json,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReportSettings {
    input: PathBuf,
    #[serde(default)]
    groups: Option<GroupSpec>,
    #[serde(default)]
    format: ReportFormat,
    #[serde(default)]
    output: Option<PathBuf>,
}

pub(super) fn report(args: ReportArgs) -> Result<(), CliError> {
    let s: ReportSettings = resolve(args.config.as_deref(), &args)?;
    let group_file = s.groups.as_ref().and_then(GroupSpec::file);
    require_files([&s.input].into_iter().chain(&group_file))?;
    let bytes = std::fs::read(&s.input).map_err(|e| CliError::Data(format!("{}: {e}", s.input.display())))?;
    let mut report: EvalReport =
        serde_json::from_slice(&bytes).map_err(|e| CliError::Data(format!("{}: {e}", s.input.display())))?;
    if let Some(spec) = &s.groups {
        let regrouped = eval::group_report(&report.per_language, &spec.resolve()?, report.params).map_err(eval_err)?;
        report = EvalReport {
            bootstrap: report.bootstrap,
            ..regrouped
        };
    }
    let rendered = match s.format {
        ReportFormat::Table => report.to_table().into_bytes(),
        ReportFormat::Json => {
            let mut b = serde_json::to_vec_pretty(&report).map_err(data_err)?;
            b.push(b'\n');
            b
        }
    };
    match &s.output {
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&rendered).map_err(data_err)
        }
        Some(out) => {
            let mut m = DatasetManifest::new(Strategy::Report, 0, &s);
            with_inputs(&mut m, &[&s.input])?;
            m.record_count = report.per_language.len() as u64;
            emit(out, &rendered, &m, &format!("{} languages", report.per_language.len()))
        }
    }
}
