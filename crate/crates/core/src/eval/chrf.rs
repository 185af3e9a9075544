use std::collections::HashMap;
use std::hash::Hash;
use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

use super::{EvalError, EvalSet};

/// ASCII punctuation split off word edges for word n-grams.
const PUNCTUATION: &str = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChrfParams {
    pub char_order: usize,
    pub word_order: usize,
    pub beta: f64,
    /// Average per-order F-scores with epsilon smoothing instead of the
    /// default effective-order averaging of precision and recall.
    #[serde(default)]
    pub eps_smoothing: bool,
}

impl Default for ChrfParams {
    /// chrF++: character 6-grams, word bigrams, beta 2.
    fn default() -> Self {
        ChrfParams {
            char_order: 6,
            word_order: 2,
            beta: 2.0,
            eps_smoothing: false,
        }
    }
}

impl ChrfParams {
    pub fn validate(&self) -> Result<(), EvalError> {
        if self.char_order == 0 || !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(EvalError::InvalidParams(*self));
        }
        Ok(())
    }

    pub fn orders(&self) -> usize {
        self.char_order + self.word_order
    }
}

/// `[hypothesis n-grams, reference n-grams, matches]` for each order,
/// character orders first, then word orders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChrfStats(pub Vec<[u64; 3]>);

impl ChrfStats {
    pub fn zeros(params: &ChrfParams) -> Self {
        ChrfStats(vec![[0; 3]; params.orders()])
    }
}

impl AddAssign<&ChrfStats> for ChrfStats {
    fn add_assign(&mut self, rhs: &ChrfStats) {
        for (a, b) in self.0.iter_mut().zip(&rhs.0) {
            a[0] += b[0];
            a[1] += b[1];
            a[2] += b[2];
        }
    }
}

/// Whitespace as understood by Python's `str.split()`.
fn is_space(c: char) -> bool {
    c.is_whitespace() || ('\u{1c}'..='\u{1f}').contains(&c)
}

fn ngram_counts<T: Eq + Hash>(items: &[T], n: usize) -> HashMap<&[T], u64> {
    let mut m = HashMap::new();
    if items.len() >= n {
        for w in items.windows(n) {
            *m.entry(w).or_insert(0) += 1;
        }
    }
    m
}

fn match_stats<K: Eq + Hash>(hyp: &HashMap<K, u64>, reference: &HashMap<K, u64>) -> [u64; 3] {
    let ref_total: u64 = reference.values().sum();
    let mut hyp_total = 0;
    let mut matches = 0;
    for (g, &c) in hyp {
        hyp_total += c;
        if let Some(&r) = reference.get(g) {
            matches += c.min(r);
        }
    }
    // hypothesis n-grams are not counted when the reference has none of this order
    let hyp_total = if reference.is_empty() { 0 } else { hyp_total };
    [hyp_total, ref_total, matches]
}

/// Whitespace tokenisation with one leading or trailing punctuation mark split off.
pub fn word_tokens(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    for w in s.split(is_space).filter(|w| !w.is_empty()) {
        let mut chars = w.chars();
        let first = chars.next().expect("non-empty");
        let last = w.chars().next_back().expect("non-empty");
        if w.chars().nth(1).is_none() {
            out.push(w);
        } else if PUNCTUATION.contains(last) {
            let cut = w.len() - last.len_utf8();
            out.push(&w[..cut]);
            out.push(&w[cut..]);
        } else if PUNCTUATION.contains(first) {
            let cut = first.len_utf8();
            out.push(&w[..cut]);
            out.push(&w[cut..]);
        } else {
            out.push(w);
        }
    }
    out
}

/// n-gram statistics for one hypothesis / reference pair.
pub fn segment_stats(hyp: &str, reference: &str, params: &ChrfParams) -> ChrfStats {
    let hc: Vec<char> = hyp.chars().filter(|c| !is_space(*c)).collect();
    let rc: Vec<char> = reference.chars().filter(|c| !is_space(*c)).collect();
    let mut stats = Vec::with_capacity(params.orders());
    for n in 1..=params.char_order {
        stats.push(match_stats(&ngram_counts(&hc, n), &ngram_counts(&rc, n)));
    }
    if params.word_order > 0 {
        let hw = word_tokens(hyp);
        let rw = word_tokens(reference);
        for n in 1..=params.word_order {
            stats.push(match_stats(&ngram_counts(&hw, n), &ngram_counts(&rw, n)));
        }
    }
    ChrfStats(stats)
}

/// F-beta score in `[0, 100]` from accumulated statistics.
pub fn f_score(stats: &ChrfStats, params: &ChrfParams) -> f64 {
    const EPS: f64 = 1e-16;
    let factor = params.beta * params.beta;
    let mut smoothed = 0.0;
    let mut avg_prec = 0.0;
    let mut avg_rec = 0.0;
    let mut effective = 0usize;
    for &[n_hyp, n_ref, n_match] in &stats.0 {
        let prec = if n_hyp > 0 { n_match as f64 / n_hyp as f64 } else { EPS };
        let rec = if n_ref > 0 { n_match as f64 / n_ref as f64 } else { EPS };
        let denom = factor * prec + rec;
        smoothed += if denom > 0.0 { (1.0 + factor) * prec * rec / denom } else { EPS };
        if n_hyp > 0 && n_ref > 0 {
            avg_prec += prec;
            avg_rec += rec;
            effective += 1;
        }
    }
    if params.eps_smoothing {
        return 100.0 * smoothed / stats.0.len() as f64;
    }
    if effective == 0 {
        return 0.0;
    }
    avg_prec /= effective as f64;
    avg_rec /= effective as f64;
    if avg_prec + avg_rec > 0.0 {
        100.0 * (1.0 + factor) * avg_prec * avg_rec / (factor * avg_prec + avg_rec)
    } else {
        0.0
    }
}

/// Sentence-level chrF++. Two empty strings score 100.
pub fn chrf_segment(hyp: &str, reference: &str, params: &ChrfParams) -> f64 {
    if hyp.chars().all(is_space) && reference.chars().all(is_space) {
        return 100.0;
    }
    f_score(&segment_stats(hyp, reference, params), params)
}

/// Corpus-level chrF++: statistics are summed over all segments before the
/// F-score is computed.
pub fn chrf_corpus(set: &EvalSet, params: &ChrfParams) -> Result<f64, EvalError> {
    params.validate()?;
    set.validate()?;
    let mut total = ChrfStats::zeros(params);
    for (h, r) in set.hypotheses.iter().zip(&set.references) {
        total += &segment_stats(h, r, params);
    }
    Ok(f_score(&total, params))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> ChrfParams {
        ChrfParams::default()
    }

    #[test]
    fn identical_is_100() {
        assert_eq!(chrf_segment("kamisaraki", "kamisaraki", &p()), 100.0);
        assert_eq!(chrf_segment("a", "a", &p()), 100.0);
    }

    #[test]
    fn disjoint_is_zero() {
        assert_eq!(chrf_segment("zzzz", "aaaa", &p()), 0.0);
    }

    #[test]
    fn empties() {
        assert_eq!(chrf_segment("", "", &p()), 100.0);
        assert_eq!(chrf_segment("", "abc", &p()), 0.0);
    }

    #[test]
    fn punctuation_split() {
        assert_eq!(word_tokens("Hello, world!"), vec!["Hello", ",", "world", "!"]);
        assert_eq!(word_tokens("(hi)"), vec!["(hi", ")"]);
        assert_eq!(word_tokens("\"quoted"), vec!["\"", "quoted"]);
        assert_eq!(word_tokens("¿Qué?"), vec!["¿Qué", "?"]);
        assert_eq!(word_tokens(". a"), vec![".", "a"]);
    }

    #[test]
    fn stats_shape() {
        let s = segment_stats("ab", "ab", &p());
        assert_eq!(s.0.len(), 8);
        assert_eq!(s.0[0], [2, 2, 2]);
        assert_eq!(s.0[1], [1, 1, 1]);
        // no 3-grams in the reference: hypothesis count suppressed
        assert_eq!(s.0[2], [0, 0, 0]);
    }

    #[test]
    fn eps_smoothing_variant() {
        let params = ChrfParams { eps_smoothing: true, ..p() };
        let v = chrf_segment("kamisaraki", "kamisaraki", &params);
        // the missing word bigram order contributes ~0
        assert!((v - 87.5).abs() < 1e-9);
    }
}
