//! Synthetic cross-lingual QA.
//!
//! For a pair `(X, Y)` with `X` in a high-resource language, a generator is
//! asked for a question `Q` that `X` answers. Since `Y` translates `X`, the
//! instruction pair `(Q + answer-language requirement, Y)` becomes a
//! cross-lingual SFT example.

mod client;

pub use client::{
    CannedResponse, GenerationClient, GenerationError, GenerationParams, HttpClient, MockClient, RetryPolicy,
};

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;

use serde::{Deserialize, Serialize};

use crate::corpus::{LanguageRegistry, ParallelRecord, RegistryError};
use crate::manifest::{DatasetManifest, Strategy};
use crate::seed;
use crate::sft::{SftRecord, Task};

const PROMPT_PREFIX: &str = "Consider this sentence: ";
const PROMPT_SUFFIX: &str =
    "\nWhat kind of specific instruction X could this be the unique answer to? Output ONLY the instruction, followed by a newline.";

/// Appended to every question; `{language}` is the target display name.
pub const DEFAULT_ANSWER_SUFFIX: &str = "Answer in {language}.";

pub fn make_question_prompt(x: &str) -> String {
    let mut s = String::with_capacity(PROMPT_PREFIX.len() + x.len() + PROMPT_SUFFIX.len());
    s.push_str(PROMPT_PREFIX);
    s.push_str(x);
    s.push_str(PROMPT_SUFFIX);
    s
}

/// Byte length of the prompt template including its `{input}` placeholder.
pub fn prompt_template_len() -> usize {
    PROMPT_PREFIX.len() + "{input}".len() + PROMPT_SUFFIX.len()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct XqaRecord {
    pub question: String,
    pub answer: String,
    pub src_sentence: String,
    pub pair: String,
}

impl XqaRecord {
    pub fn into_sft(self) -> SftRecord {
        SftRecord {
            instruction: self.question,
            input: String::new(),
            output: self.answer,
            task: Task::Xqa,
            pair: Some(self.pair),
            lang: None,
            template_id: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum XqaError {
    #[error("generator returned no usable question")]
    InvalidGeneration,
    #[error("empty source sentence")]
    EmptySource,
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error("generation endpoint failed for pair #{index}: {source}")]
    Endpoint {
        index: usize,
        #[source]
        source: GenerationError,
    },
}

/// Turns raw generator output into the final question: first non-blank line,
/// trimmed, plus the answer-language requirement.
pub fn finish_question(generated: &str, target_name: &str, suffix: &str) -> Option<String> {
    let line = generated.lines().map(str::trim).find(|l| !l.is_empty())?;
    Some(format!("{line} {}", suffix.replace("{language}", target_name)))
}

pub fn synthesize(
    pair: &ParallelRecord,
    client: &dyn GenerationClient,
    params: &GenerationParams,
    registry: &LanguageRegistry,
    suffix: &str,
) -> Result<XqaRecord, XqaError> {
    if pair.src.trim().is_empty() {
        return Err(XqaError::EmptySource);
    }
    let target = registry.name(&pair.tgt_lang)?;
    let generated = client
        .generate(&make_question_prompt(&pair.src), params)
        .map_err(|source| XqaError::Endpoint { index: 0, source })?;
    let question = finish_question(&generated, target, suffix).ok_or(XqaError::InvalidGeneration)?;
    Ok(XqaRecord {
        question,
        answer: pair.tgt.clone(),
        src_sentence: pair.src.clone(),
        pair: pair.pair_key(),
    })
}

fn default_suffix() -> String {
    DEFAULT_ANSWER_SUFFIX.to_string()
}

fn default_concurrency() -> usize {
    4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XqaConfig {
    /// Number of pairs to process; `None` processes all of them.
    #[serde(default)]
    pub limit: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    /// Maximum in-flight generation requests.
    #[serde(default = "default_concurrency")]
    pub concurrency: usize,
    #[serde(default)]
    pub params: GenerationParams,
    #[serde(default = "default_suffix")]
    pub answer_suffix: String,
}

impl Default for XqaConfig {
    fn default() -> Self {
        XqaConfig {
            limit: None,
            seed: 0,
            concurrency: default_concurrency(),
            params: GenerationParams::default(),
            answer_suffix: default_suffix(),
        }
    }
}

/// Generates XQA records for a seeded sample of `limit` pairs.
///
/// Records come out in input-pair order whatever order requests finish in.
/// Blank generations are skipped and counted; an endpoint failure (after the
/// client's own retries) aborts the build.
pub fn build_xqa_dataset(
    pairs: &[ParallelRecord],
    client: &dyn GenerationClient,
    config: &XqaConfig,
    registry: &LanguageRegistry,
) -> Result<(Vec<SftRecord>, DatasetManifest), XqaError> {
    let limit = config.limit.unwrap_or(pairs.len()).min(pairs.len());
    let mut chosen: Vec<usize> = (0..pairs.len()).collect();
    seed::shuffle(&mut chosen, config.seed, "xqa/sample");
    chosen.truncate(limit);
    chosen.sort_unstable();

    for &i in &chosen {
        registry.name(&pairs[i].tgt_lang)?;
    }

    let workers = config.concurrency.clamp(1, chosen.len().max(1));
    let next = AtomicUsize::new(0);
    let abort = AtomicBool::new(false);
    let (tx, rx) = mpsc::channel();
    std::thread::scope(|s| {
        for _ in 0..workers {
            let tx = tx.clone();
            let (next, abort, chosen) = (&next, &abort, &chosen);
            s.spawn(move || loop {
                if abort.load(Ordering::Relaxed) {
                    break;
                }
                let slot = next.fetch_add(1, Ordering::Relaxed);
                let Some(&idx) = chosen.get(slot) else { break };
                let result = synthesize(&pairs[idx], client, &config.params, registry, &config.answer_suffix);
                if matches!(result, Err(XqaError::Endpoint { .. })) {
                    abort.store(true, Ordering::Relaxed);
                }
                if tx.send((slot, idx, result)).is_err() {
                    break;
                }
            });
        }
    });
    drop(tx);

    let mut results: Vec<Option<(usize, Result<XqaRecord, XqaError>)>> = (0..chosen.len()).map(|_| None).collect();
    for (slot, idx, r) in rx {
        results[slot] = Some((idx, r));
    }

    let mut records = Vec::new();
    let mut skipped = 0u64;
    for (idx, r) in results.into_iter().flatten() {
        match r {
            Ok(rec) => records.push(rec.into_sft()),
            Err(XqaError::InvalidGeneration | XqaError::EmptySource) => skipped += 1,
            Err(XqaError::Endpoint { source, .. }) => return Err(XqaError::Endpoint { index: idx, source }),
            Err(e) => return Err(e),
        }
    }

    let mut manifest = DatasetManifest::new(Strategy::Xqa, config.seed, config);
    manifest.record_count = records.len() as u64;
    manifest.bump("xqa", records.len() as u64);
    manifest.bump("processed", chosen.len() as u64);
    manifest.skipped.insert("invalid_generation".into(), skipped);
    manifest.notes.insert("generator".into(), client.describe());
    manifest.notes.insert("prompt_template".into(), make_question_prompt("{input}"));
    Ok((records, manifest))
}
