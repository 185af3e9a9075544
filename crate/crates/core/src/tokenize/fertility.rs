use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{count_whitespace, TokenCounter, TokenizeError};
use crate::corpus::MonoRecord;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LangFertility {
    pub tokens: u64,
    pub words: u64,
    /// tokens / words
    pub fertility: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FertilityReport {
    pub per_language: BTreeMap<String, LangFertility>,
    /// Unweighted mean over languages with at least one word.
    pub average: f64,
    /// Languages dropped because they contain no whitespace words.
    pub excluded: Vec<String>,
}

/// Builds a report from per-language `(tokens, words)` totals.
pub fn fertility_from_totals(totals: &BTreeMap<String, (u64, u64)>) -> Result<FertilityReport, TokenizeError> {
    let mut per_language = BTreeMap::new();
    let mut excluded = Vec::new();
    for (lang, &(tokens, words)) in totals {
        if words == 0 {
            excluded.push(lang.clone());
            continue;
        }
        per_language.insert(
            lang.clone(),
            LangFertility {
                tokens,
                words,
                fertility: tokens as f64 / words as f64,
            },
        );
    }
    if per_language.is_empty() {
        return Err(TokenizeError::UndefinedFertility);
    }
    let average = per_language.values().map(|f| f.fertility).sum::<f64>() / per_language.len() as f64;
    Ok(FertilityReport {
        per_language,
        average,
        excluded,
    })
}

/// Tokens per whitespace word, per language and macro-averaged.
pub fn fertility(records: &[MonoRecord], counter: &dyn TokenCounter) -> Result<FertilityReport, TokenizeError> {
    let counts = records
        .par_iter()
        .map(|r| Ok((counter.count(&r.text)? as u64, count_whitespace(&r.text) as u64)))
        .collect::<Result<Vec<_>, TokenizeError>>()?;
    totals_report(records, &counts)
}

/// Fertility from externally computed per-record token counts (sidecar input).
pub fn fertility_with_counts(records: &[MonoRecord], tokens: &[u64]) -> Result<FertilityReport, TokenizeError> {
    if tokens.len() != records.len() {
        return Err(TokenizeError::SidecarLength {
            counts: tokens.len(),
            records: records.len(),
        });
    }
    let counts: Vec<(u64, u64)> = records
        .iter()
        .zip(tokens)
        .map(|(r, &t)| (t, count_whitespace(&r.text) as u64))
        .collect();
    totals_report(records, &counts)
}

fn totals_report(records: &[MonoRecord], counts: &[(u64, u64)]) -> Result<FertilityReport, TokenizeError> {
    let mut totals: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    for (r, &(t, w)) in records.iter().zip(counts) {
        let e = totals.entry(r.lang.clone()).or_default();
        e.0 += t;
        e.1 += w;
    }
    fertility_from_totals(&totals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenize::WhitespaceCounter;

    #[test]
    fn hand_arithmetic() {
        let totals = [("a".to_string(), (10, 4)), ("b".to_string(), (6, 4))].into_iter().collect();
        let rep = fertility_from_totals(&totals).unwrap();
        assert_eq!(rep.per_language["a"].fertility, 2.5);
        assert_eq!(rep.per_language["b"].fertility, 1.5);
        assert_eq!(rep.average, 2.0);
    }

    #[test]
    fn zero_word_languages_are_excluded() {
        let totals = [("a".to_string(), (4, 4)), ("b".to_string(), (3, 0))].into_iter().collect();
        let rep = fertility_from_totals(&totals).unwrap();
        assert_eq!(rep.excluded, vec!["b".to_string()]);
        assert_eq!(rep.average, 1.0);
        let only_empty = [("b".to_string(), (0, 0))].into_iter().collect();
        assert!(matches!(fertility_from_totals(&only_empty), Err(TokenizeError::UndefinedFertility)));
    }

    #[test]
    fn whitespace_counter_gives_one() {
        let recs = vec![MonoRecord::new("aym", "jallalla  marka", "s"), MonoRecord::new("quy", "allillanchu", "s")];
        let rep = fertility(&recs, &WhitespaceCounter).unwrap();
        assert_eq!(rep.average, 1.0);
    }

    #[test]
    fn sidecar_length_checked() {
        let recs = vec![MonoRecord::new("aym", "a b c d", "s")];
        assert!(fertility_with_counts(&recs, &[1, 2]).is_err());
        assert_eq!(fertility_with_counts(&recs, &[4]).unwrap().average, 1.0);
    }
}
