//! Alpaca-format supervised fine-tuning datasets.
//!
//! Every record is an `(instruction, input, output)` triple; the prompt is
//! `instruction` + `input` and the training target is `output` alone, so a
//! trainer can mask the loss to the output tokens.

use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{LanguageRegistry, ParallelRecord, RegistryError};
use crate::io::{self, IoError};
use crate::manifest::{DatasetManifest, Strategy};
use crate::sampling::{self, SamplingError};
use crate::seed;

pub const DEFAULT_SFT_TAU: f64 = 80.0;

/// Contract recorded in SFT manifests for downstream trainers.
pub const LOSS_MASK_NOTE: &str = "prompt = instruction + input; compute loss on output tokens only";

const STANDARD_PATTERNS: [&str; 14] = [
    "Translate the following sentence from {src_lang} to {tgt_lang}.",
    "Can you convert the following sentence from {src_lang} to {tgt_lang}.",
    "Kindly translate this sentence from {src_lang} into {tgt_lang}.",
    "Could you translate the following from {src_lang} to {tgt_lang}?",
    "Proceed to translate the subsequent sentence from {src_lang} to {tgt_lang}.",
    "Change the following sentence from {src_lang} to {tgt_lang}.",
    "Render the sentence below from {src_lang} into {tgt_lang}.",
    "Switch the following sentence from {src_lang} into {tgt_lang} language.",
    "Rephrase the following sentence into {tgt_lang} from {src_lang}.",
    "Transform the following text from {src_lang} to {tgt_lang}.",
    "Can you restate the following sentence from {src_lang} in {tgt_lang}?",
    "Please provide a translation for this sentence from {src_lang} to {tgt_lang}.",
    "Adapt the following into {tgt_lang} from the original {src_lang}.",
    "Translate the subsequent text from {src_lang} into the {tgt_lang} language.",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Mt,
    Xqa,
    General,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Mt => "mt",
            Task::Xqa => "xqa",
            Task::General => "general",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SftRecord {
    pub instruction: String,
    pub input: String,
    pub output: String,
    pub task: Task,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lang: Option<String>,
    /// Template used to render an MT instruction. Not serialized.
    #[serde(skip)]
    pub template_id: Option<u8>,
}

impl SftRecord {
    pub fn check(&self) -> Result<(), String> {
        if self.instruction.trim().is_empty() {
            return Err("empty instruction".into());
        }
        if self.output.trim().is_empty() {
            return Err("empty output".into());
        }
        if self.task == Task::Mt && self.input.trim().is_empty() {
            return Err("MT record without input".into());
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SftError {
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error("template {id}: pattern must contain {{src_lang}} and {{tgt_lang}} exactly once")]
    InvalidTemplate { id: u8 },
    #[error("no prompt templates supplied")]
    NoTemplates,
    #[error("{path}:{line}: missing or non-string key {key:?}")]
    Schema { path: String, line: usize, key: String },
    #[error("{path}:{line}: {message}")]
    InvalidRecord { path: String, line: usize, message: String },
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("component {component:?} requests {requested} records but only {available} are available (deficit {deficit})")]
    Shortfall {
        component: String,
        requested: usize,
        available: usize,
        deficit: usize,
    },
    #[error("unknown dataset {0:?} in mixture spec")]
    UnknownDataset(String),
    #[error("invalid mixture spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
}

/// Translation instruction with `{src_lang}` / `{tgt_lang}` placeholders.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTemplate {
    pub id: u8,
    pub pattern: String,
}

impl PromptTemplate {
    pub fn new(id: u8, pattern: impl Into<String>) -> Result<Self, SftError> {
        let pattern = pattern.into();
        let once = |p: &str| pattern.matches(p).count() == 1;
        if id == 0 || !once("{src_lang}") || !once("{tgt_lang}") {
            return Err(SftError::InvalidTemplate { id });
        }
        Ok(PromptTemplate { id, pattern })
    }

    pub fn render(&self, src_name: &str, tgt_name: &str) -> String {
        self.pattern
            .replace("{src_lang}", src_name)
            .replace("{tgt_lang}", tgt_name)
    }
}

/// The fourteen translation instructions, ids 1 to 14.
pub fn standard_templates() -> Vec<PromptTemplate> {
    STANDARD_PATTERNS
        .iter()
        .enumerate()
        .map(|(i, p)| PromptTemplate::new(i as u8 + 1, *p).expect("standard templates are valid"))
        .collect()
}

pub fn render_mt(pair: &ParallelRecord, template: &PromptTemplate, registry: &LanguageRegistry) -> Result<SftRecord, SftError> {
    let src = registry.name(&pair.src_lang)?;
    let tgt = registry.name(&pair.tgt_lang)?;
    Ok(SftRecord {
        instruction: template.render(src, tgt),
        input: pair.src.clone(),
        output: pair.tgt.clone(),
        task: Task::Mt,
        pair: Some(pair.pair_key()),
        lang: None,
        template_id: Some(template.id),
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateMode {
    /// Uniform i.i.d. draw per record.
    #[default]
    Random,
    /// Always the first template of the list (id 1 for the standard list).
    Constant,
}

/// Renders one MT record per pair, in input order.
pub fn build_mt_dataset(
    pairs: &[ParallelRecord],
    templates: &[PromptTemplate],
    mode: TemplateMode,
    seed: u64,
    registry: &LanguageRegistry,
) -> Result<Vec<SftRecord>, SftError> {
    if templates.is_empty() {
        return Err(SftError::NoTemplates);
    }
    let mut rng = seed::rng_for(seed, "sft/templates");
    pairs
        .iter()
        .map(|p| {
            let t = match mode {
                TemplateMode::Constant => &templates[0],
                TemplateMode::Random => &templates[rng.random_range(0..templates.len())],
            };
            render_mt(p, t, registry)
        })
        .collect()
}

/// Temperature-balances pairs across directions and returns exactly `count` of them.
pub fn sample_mt_pairs(pairs: &[ParallelRecord], tau: f64, count: usize, seed: u64) -> Result<Vec<ParallelRecord>, SftError> {
    let mut groups: BTreeMap<String, Vec<ParallelRecord>> = BTreeMap::new();
    for p in pairs {
        groups.entry(p.pair_key()).or_default().push(p.clone());
    }
    let sizes = groups.iter().map(|(k, v)| (k.clone(), v.len() as f64)).collect();
    let cfg = sampling::SamplingConfig::new(tau, Some(count), seed::derive_seed(seed, "sft/mt-sample"));
    Ok(sampling::balance(&groups, &sizes, &cfg)?.0)
}

/// Which JSON keys hold the Alpaca fields in a general-purpose dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeyMapping {
    pub instruction: String,
    /// `None` means the dataset has no input field; input becomes `""`.
    #[serde(default)]
    pub input: Option<String>,
    pub output: String,
}

impl Default for KeyMapping {
    fn default() -> Self {
        KeyMapping {
            instruction: "instruction".into(),
            input: Some("input".into()),
            output: "output".into(),
        }
    }
}

impl KeyMapping {
    /// `inputs` / `targets` rows as found in Aya.
    pub fn aya() -> Self {
        KeyMapping {
            instruction: "inputs".into(),
            input: None,
            output: "targets".into(),
        }
    }
}

/// Reads a JSONL instruction dataset and normalises its keys. Field text is kept verbatim.
pub fn ingest_general(path: &Path, mapping: &KeyMapping, task: Task, lang: Option<&str>) -> Result<Vec<SftRecord>, SftError> {
    let mut out = Vec::new();
    for (i, line) in io::read_text_lines(path)?.into_iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let ctx = |key: &str| SftError::Schema {
            path: path.display().to_string(),
            line: i + 1,
            key: key.to_string(),
        };
        let value: serde_json::Value = serde_json::from_str(&line).map_err(|e| SftError::InvalidRecord {
            path: path.display().to_string(),
            line: i + 1,
            message: e.to_string(),
        })?;
        let get = |key: &str| -> Result<String, SftError> {
            value
                .get(key)
                .and_then(|v| v.as_str())
                .map(str::to_string)
                .ok_or_else(|| ctx(key))
        };
        let record = SftRecord {
            instruction: get(&mapping.instruction)?,
            input: match &mapping.input {
                Some(k) => get(k)?,
                None => String::new(),
            },
            output: get(&mapping.output)?,
            task,
            pair: None,
            lang: lang.map(str::to_string),
            template_id: None,
        };
        record.check().map_err(|message| SftError::InvalidRecord {
            path: path.display().to_string(),
            line: i + 1,
            message,
        })?;
        out.push(record);
    }
    Ok(out)
}

/// One slice of a mixture: `count` (or `fraction` of `total`) records of
/// `task` taken from the named dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureComponent {
    pub dataset: String,
    pub task: Task,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fraction: Option<f64>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureSpec {
    pub components: Vec<MixtureComponent>,
    pub total: usize,
    #[serde(default = "one")]
    pub epochs: usize,
    #[serde(default)]
    pub seed: u64,
}

impl MixtureSpec {
    /// Resolves every component to an exact record count.
    pub fn resolve_counts(&self) -> Result<Vec<usize>, SftError> {
        if self.epochs == 0 {
            return Err(SftError::InvalidSpec("epochs must be at least 1".into()));
        }
        if self.components.is_empty() {
            return Err(SftError::InvalidSpec("no components".into()));
        }
        let all_counts = self.components.iter().all(|c| c.count.is_some() && c.fraction.is_none());
        let all_fractions = self.components.iter().all(|c| c.fraction.is_some() && c.count.is_none());
        if all_counts {
            let counts: Vec<usize> = self.components.iter().map(|c| c.count.unwrap_or(0)).collect();
            let sum: usize = counts.iter().sum();
            if sum != self.total {
                return Err(SftError::InvalidSpec(format!(
                    "component counts sum to {sum}, total is {}",
                    self.total
                )));
            }
            Ok(counts)
        } else if all_fractions {
            let fracs: Vec<f64> = self.components.iter().map(|c| c.fraction.unwrap_or(0.0)).collect();
            if fracs.iter().any(|f| !(0.0..=1.0).contains(f)) {
                return Err(SftError::InvalidSpec("fractions must lie in [0, 1]".into()));
            }
            let sum: f64 = fracs.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(SftError::InvalidSpec(format!("fractions sum to {sum}, expected 1")));
            }
            // zero-padded keys keep component order for remainder ties
            let probs = fracs
                .iter()
                .enumerate()
                .map(|(i, f)| (format!("{i:06}"), *f))
                .collect();
            Ok(sampling::allocate(&probs, self.total).into_values().collect())
        } else {
            Err(SftError::InvalidSpec(
                "every component needs exactly one of count or fraction, and all must use the same one".into(),
            ))
        }
    }
}

/// Takes each component's share from a seeded shuffle of its dataset
/// (restricted to the component task), concatenates, shuffles once, then
/// repeats for the requested epochs.
pub fn compose_mixture(
    spec: &MixtureSpec,
    datasets: &BTreeMap<String, Vec<SftRecord>>,
) -> Result<(Vec<SftRecord>, DatasetManifest), SftError> {
    let counts = spec.resolve_counts()?;
    let mut out = Vec::with_capacity(spec.total);
    let mut manifest = DatasetManifest::new(Strategy::SftMixture, spec.seed, spec);
    for (i, (component, &count)) in spec.components.iter().zip(&counts).enumerate() {
        let source = datasets
            .get(&component.dataset)
            .ok_or_else(|| SftError::UnknownDataset(component.dataset.clone()))?;
        let mut pool: Vec<&SftRecord> = source.iter().filter(|r| r.task == component.task).collect();
        if pool.len() < count {
            return Err(SftError::Shortfall {
                component: component.dataset.clone(),
                requested: count,
                available: pool.len(),
                deficit: count - pool.len(),
            });
        }
        seed::shuffle(&mut pool, spec.seed, &format!("sft/component/{i}/{}", component.dataset));
        out.extend(pool.into_iter().take(count).cloned());
        manifest.bump(format!("component:{}", component.dataset), count as u64);
    }
    seed::shuffle(&mut out, spec.seed, "sft/mixture");
    if spec.epochs > 1 {
        out = repeat_epochs(&out, spec.epochs, seed::derive_seed(spec.seed, "sft/epochs"));
    }
    for r in &out {
        manifest.bump(r.task.as_str(), 1);
    }
    manifest.record_count = out.len() as u64;
    manifest.notes.insert("loss_mask".into(), LOSS_MASK_NOTE.into());
    Ok((out, manifest))
}

/// Concatenates `epochs` independently shuffled copies. Records (and their
/// rendered templates) are not changed.
pub fn repeat_epochs(dataset: &[SftRecord], epochs: usize, seed: u64) -> Vec<SftRecord> {
    let mut out = Vec::with_capacity(dataset.len() * epochs);
    for e in 0..epochs {
        let mut copy = dataset.to_vec();
        seed::shuffle(&mut copy, seed, &format!("sft/epoch/{e}"));
        out.extend(copy);
    }
    out
}
