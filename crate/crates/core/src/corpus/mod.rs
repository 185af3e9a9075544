//! Canonical record types for monolingual and parallel corpora.

mod ingest;
mod lang;
mod stats;
mod validate;

pub use ingest::{ingest_mono, ingest_parallel, Ingested, MonoStream, ParallelSource};
pub use lang::{validate_code, LanguageRegistry, LanguageTag, RegistryError};
pub use stats::{compute_stats, CorpusStats, LangCounts, Segments};
pub use validate::{validate, Validate, ValidationReport, Violation};

use serde::{Deserialize, Serialize};

use crate::io::IoError;

/// One monolingual segment.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MonoRecord {
    pub lang: String,
    pub text: String,
    pub source: String,
}

/// One sentence-aligned bitext pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParallelRecord {
    pub src_lang: String,
    pub tgt_lang: String,
    pub src: String,
    pub tgt: String,
    pub source: String,
}

impl MonoRecord {
    pub fn new(lang: impl Into<String>, text: impl Into<String>, source: impl Into<String>) -> Self {
        MonoRecord {
            lang: lang.into(),
            text: text.into(),
            source: source.into(),
        }
    }
}

impl ParallelRecord {
    pub fn new(
        src_lang: impl Into<String>,
        tgt_lang: impl Into<String>,
        src: impl Into<String>,
        tgt: impl Into<String>,
        source: impl Into<String>,
    ) -> Self {
        ParallelRecord {
            src_lang: src_lang.into(),
            tgt_lang: tgt_lang.into(),
            src: src.into(),
            tgt: tgt.into(),
            source: source.into(),
        }
    }

    /// `"src-tgt"`, the key parallel data is balanced and reported by.
    pub fn pair_key(&self) -> String {
        format!("{}-{}", self.src_lang, self.tgt_lang)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("line count mismatch between {src} and {tgt}: {src_lines} vs {tgt_lines}")]
    Alignment {
        src: String,
        tgt: String,
        src_lines: usize,
        tgt_lines: usize,
    },
    #[error("{path}:{line}: expected 2 tab-separated fields, found {fields}")]
    Format {
        path: String,
        line: usize,
        fields: usize,
    },
    #[error(transparent)]
    Language(#[from] RegistryError),
    #[error("source and target language are both {0:?}")]
    SameLanguage(String),
}
