//! chrF++ scoring, bootstrap resampling and grouped reports.

mod bootstrap;
mod chrf;
mod report;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::io::{self, IoError};

pub use bootstrap::{bootstrap, BootstrapResult};
pub use chrf::{chrf_corpus, chrf_segment, f_score, segment_stats, word_tokens, ChrfParams, ChrfStats};
pub use report::{american_groups, evaluate, group_report, EvalReport, Groups};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{lang}: {hypotheses} hypotheses vs {references} references")]
    Alignment {
        lang: String,
        hypotheses: usize,
        references: usize,
    },
    #[error("{0}: evaluation set is empty")]
    Empty(String),
    #[error("language {0:?} appears in more than one evaluation set")]
    DuplicateLanguage(String),
    #[error("invalid chrF parameters: {0:?}")]
    InvalidParams(ChrfParams),
    #[error("bootstrap needs at least one resample")]
    NoResamples,
    #[error("group {group:?} names {lang:?}, which has no evaluation set")]
    MissingGroupLanguage { group: String, lang: String },
    #[error("language {lang:?} is listed in groups {first:?} and {second:?}")]
    OverlappingGroups {
        lang: String,
        first: String,
        second: String,
    },
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{path}: {message}")]
    Manifest { path: PathBuf, message: String },
}

/// Hypotheses and references for one language, aligned by position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalSet {
    pub lang: String,
    pub hypotheses: Vec<String>,
    pub references: Vec<String>,
}

impl EvalSet {
    pub fn new(lang: impl Into<String>, hypotheses: Vec<String>, references: Vec<String>) -> Self {
        EvalSet {
            lang: lang.into(),
            hypotheses,
            references,
        }
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        if self.hypotheses.len() != self.references.len() {
            return Err(EvalError::Alignment {
                lang: self.lang.clone(),
                hypotheses: self.hypotheses.len(),
                references: self.references.len(),
            });
        }
        if self.hypotheses.is_empty() {
            return Err(EvalError::Empty(self.lang.clone()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }

    /// Reads one hypothesis and one reference per line.
    pub fn from_files(lang: impl Into<String>, hyp: &Path, reference: &Path) -> Result<Self, EvalError> {
        let set = EvalSet::new(lang, io::read_text_lines(hyp)?, io::read_text_lines(reference)?);
        set.validate()?;
        Ok(set)
    }
}

/// One entry of an evaluation manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalEntry {
    pub lang: String,
    pub hyp: PathBuf,
    #[serde(rename = "ref")]
    pub reference: PathBuf,
}

/// Loads a JSON array of `{"lang", "hyp", "ref"}` entries. Relative paths
/// resolve against the manifest's directory.
pub fn load_eval_manifest(path: &Path) -> Result<Vec<EvalSet>, EvalError> {
    let bytes = std::fs::read(path).map_err(|e| IoError::io(path, e))?;
    let entries: Vec<EvalEntry> = serde_json::from_slice(&bytes).map_err(|e| EvalError::Manifest {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut sets = Vec::with_capacity(entries.len());
    for e in entries {
        sets.push(EvalSet::from_files(e.lang, &base.join(&e.hyp), &base.join(&e.reference))?);
    }
    check_unique(&sets)?;
    Ok(sets)
}

pub(crate) fn check_unique(sets: &[EvalSet]) -> Result<(), EvalError> {
    let mut seen = std::collections::BTreeSet::new();
    for s in sets {
        if !seen.insert(s.lang.as_str()) {
            return Err(EvalError::DuplicateLanguage(s.lang.clone()));
        }
    }
    Ok(())
}
