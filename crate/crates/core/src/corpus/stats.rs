use std::collections::BTreeMap;
use std::ops::{Add, AddAssign};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{MonoRecord, ParallelRecord};
use crate::tokenize::{count_whitespace, TokenCounter, TokenizeError};

/// Records that contribute `(language, text)` segments to corpus statistics.
pub trait Segments {
    fn segments(&self) -> Vec<(&str, &str)>;
}

impl Segments for MonoRecord {
    fn segments(&self) -> Vec<(&str, &str)> {
        vec![(&self.lang, &self.text)]
    }
}

/// Each side is attributed to its own language.
impl Segments for ParallelRecord {
    fn segments(&self) -> Vec<(&str, &str)> {
        vec![(&self.src_lang, &self.src), (&self.tgt_lang, &self.tgt)]
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LangCounts {
    pub segments: u64,
    pub words: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tokens: Option<u64>,
}

impl AddAssign for LangCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.segments += rhs.segments;
        self.words += rhs.words;
        self.tokens = match (self.tokens, rhs.tokens) {
            (None, None) => None,
            (a, b) => Some(a.unwrap_or(0) + b.unwrap_or(0)),
        };
    }
}

impl Add for LangCounts {
    type Output = LangCounts;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

/// Per-language segment / word / token counts plus their field-wise totals.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub per_language: BTreeMap<String, LangCounts>,
    pub totals: LangCounts,
}

impl CorpusStats {
    fn record(&mut self, lang: &str, counts: LangCounts) {
        *self.per_language.entry(lang.to_string()).or_default() += counts;
        self.totals += counts;
    }

    /// Sizes per language in segments.
    pub fn segment_sizes(&self) -> BTreeMap<String, f64> {
        self.per_language
            .iter()
            .map(|(l, c)| (l.clone(), c.segments as f64))
            .collect()
    }
}

impl AddAssign<&CorpusStats> for CorpusStats {
    fn add_assign(&mut self, rhs: &CorpusStats) {
        for (lang, counts) in &rhs.per_language {
            self.record(lang, *counts);
        }
    }
}

impl Add for CorpusStats {
    type Output = CorpusStats;
    fn add(mut self, rhs: Self) -> Self {
        self += &rhs;
        self
    }
}

/// Counts segments, whitespace words and (when a counter is given) tokens per language.
///
/// Work is split across the rayon pool; the result equals a sequential pass.
pub fn compute_stats<R>(records: &[R], counter: Option<&dyn TokenCounter>) -> Result<CorpusStats, TokenizeError>
where
    R: Segments + Sync,
{
    records
        .par_iter()
        .try_fold(CorpusStats::default, |mut acc, rec| {
            for (lang, text) in rec.segments() {
                let tokens = match counter {
                    Some(c) => Some(c.count(text)? as u64),
                    None => None,
                };
                acc.record(
                    lang,
                    LangCounts {
                        segments: 1,
                        words: count_whitespace(text) as u64,
                        tokens,
                    },
                );
            }
            Ok(acc)
        })
        .try_reduce(CorpusStats::default, |a, b| Ok(a + b))
}
