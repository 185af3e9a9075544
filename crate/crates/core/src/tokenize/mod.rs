//! Token counting and fertility.
//!
//! Any tokenizer plugs in through [`TokenCounter`]. Two concrete counters ship
//! with the crate: [`WhitespaceCounter`] and the file-backed [`BpeModel`].
//! Counts produced by an external tokenizer can instead be supplied as a
//! sidecar JSONL stream of `{"tokens": n}` objects aligned with the corpus.

mod bpe;
mod fertility;

pub use bpe::BpeModel;
pub use fertility::{fertility, fertility_from_totals, fertility_with_counts, FertilityReport, LangFertility};

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::io::{self, IoError};

#[derive(Debug, thiserror::Error)]
pub enum TokenizeError {
    #[error("character {ch:?} (U+{code:04X}) is not covered by the vocabulary and byte fallback is disabled")]
    Coverage { ch: char, code: u32 },
    #[error("merge rule {left:?} + {right:?} produces {merged:?}, which is missing from the vocabulary")]
    MergeOutsideVocab {
        left: String,
        right: String,
        merged: String,
    },
    #[error("{path}:{line}: {message}")]
    ModelFormat {
        path: String,
        line: usize,
        message: String,
    },
    #[error("fertility is undefined: no language has any whitespace words")]
    UndefinedFertility,
    #[error("token count sidecar has {counts} entries for {records} records")]
    SidecarLength { counts: usize, records: usize },
    #[error(transparent)]
    Io(#[from] IoError),
}

/// Counts tokens in a piece of text. `count("")` must be 0 and counting must be pure.
pub trait TokenCounter: Send + Sync {
    fn name(&self) -> &str;
    fn count(&self, text: &str) -> Result<usize, TokenizeError>;
}

/// Number of maximal non-whitespace runs.
pub fn count_whitespace(text: &str) -> usize {
    text.split_whitespace().count()
}

/// Treats every whitespace-delimited word as one token.
#[derive(Debug, Clone, Copy, Default)]
pub struct WhitespaceCounter;

impl TokenCounter for WhitespaceCounter {
    fn name(&self) -> &str {
        "whitespace"
    }

    fn count(&self, text: &str) -> Result<usize, TokenizeError> {
        Ok(count_whitespace(text))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SidecarCount {
    pub tokens: u64,
}

/// Reads precomputed per-record token counts.
pub fn read_sidecar(path: &Path) -> Result<Vec<u64>, TokenizeError> {
    Ok(io::read_jsonl::<SidecarCount>(path)?
        .into_iter()
        .map(|c| c.tokens)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whitespace_runs() {
        assert_eq!(count_whitespace("a  b c"), 3);
        assert_eq!(count_whitespace(""), 0);
        assert_eq!(count_whitespace("  \t "), 0);
        assert_eq!(count_whitespace(" lead and trail "), 3);
    }
}
