use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{validate_code, MonoRecord, ParallelRecord};

/// Record-level checks used by [`validate`].
pub trait Validate {
    /// Exact-match identity used for duplicate detection.
    fn dedup_key(&self) -> String;
    fn problems(&self) -> Vec<String>;
    fn source(&self) -> &str;
}

fn text_problems(field: &str, text: &str, out: &mut Vec<String>) {
    if text.trim().is_empty() {
        out.push(format!("{field} is empty"));
    }
    if text.contains('\n') || text.contains('\r') {
        out.push(format!("{field} contains a line break"));
    }
}

impl Validate for MonoRecord {
    fn dedup_key(&self) -> String {
        format!("{}\u{0}{}", self.lang, self.text)
    }

    fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Err(e) = validate_code(&self.lang) {
            out.push(e.to_string());
        }
        text_problems("text", &self.text, &mut out);
        out
    }

    fn source(&self) -> &str {
        &self.source
    }
}

impl Validate for ParallelRecord {
    fn dedup_key(&self) -> String {
        format!("{}\u{0}{}\u{0}{}\u{0}{}", self.src_lang, self.tgt_lang, self.src, self.tgt)
    }

    fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        for code in [&self.src_lang, &self.tgt_lang] {
            if let Err(e) = validate_code(code) {
                out.push(e.to_string());
            }
        }
        if self.src_lang == self.tgt_lang {
            out.push(format!("src_lang equals tgt_lang ({})", self.src_lang));
        }
        text_problems("src", &self.src, &mut out);
        text_problems("tgt", &self.tgt, &mut out);
        out
    }

    fn source(&self) -> &str {
        &self.source
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// 0-based record index.
    pub index: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub records: usize,
    /// Records whose exact content already appeared earlier in the stream.
    pub duplicates: usize,
    pub violations: Vec<Violation>,
    pub per_source: BTreeMap<String, usize>,
}

/// Report-only pass; input is never modified.
pub fn validate<R: Validate>(records: &[R]) -> ValidationReport {
    let mut seen = HashSet::with_capacity(records.len());
    let mut report = ValidationReport {
        records: records.len(),
        ..Default::default()
    };
    for (index, r) in records.iter().enumerate() {
        if !seen.insert(r.dedup_key()) {
            report.duplicates += 1;
        }
        for message in r.problems() {
            report.violations.push(Violation { index, message });
        }
        *report.per_source.entry(r.source().to_string()).or_insert(0) += 1;
    }
    report
}
