//! Continued-pretraining corpus construction.
//!
//! Three ways of folding bitext into a pretraining corpus:
//!
//! * `all_mono`: target sides of all pairs are used as extra monolingual text.
//! * `mono_parallel_concat`: pairs become one two-line sequence
//!   `"<src>: source\n<tgt>: target"` until they make up the requested ratio of
//!   the corpus; remaining pairs fall back to the `all_mono` treatment.
//! * `mono_parallel_separate`: both sides are added as independent sentences.
//!
//! Monolingual data and concatenated pairs are balanced independently with
//! temperature sampling, and the final corpus gets one seeded global shuffle.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{MonoRecord, ParallelRecord};
use crate::manifest::{DatasetManifest, Strategy};
use crate::sampling::{self, LanguageAllocation, SamplingError, SizeUnit};
use crate::seed;
use crate::tokenize::{TokenCounter, TokenizeError, WhitespaceCounter};

pub const DEFAULT_CPT_TAU: f64 = 30.0;

/// Human-readable form of the concatenated-pair layout, recorded in manifests.
pub const CONCAT_FORMAT: &str = "<src_lang>: {src}\\n<tgt_lang>: {tgt}";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixStrategy {
    AllMono,
    MonoParallelConcat,
    MonoParallelSeparate,
}

impl MixStrategy {
    fn manifest_strategy(self) -> Strategy {
        match self {
            MixStrategy::AllMono => Strategy::AllMono,
            MixStrategy::MonoParallelConcat => Strategy::MonoParallelConcat,
            MixStrategy::MonoParallelSeparate => Strategy::MonoParallelSeparate,
        }
    }
}

fn default_tau() -> f64 {
    DEFAULT_CPT_TAU
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixerConfig {
    pub strategy: MixStrategy,
    /// Fraction of output lines that are concatenated pairs. Only read by the concat strategy.
    #[serde(default)]
    pub parallel_ratio: f64,
    /// Output line count; `None` keeps every input unit exactly once.
    #[serde(default)]
    pub target_size: Option<usize>,
    #[serde(default = "default_tau")]
    pub mono_tau: f64,
    #[serde(default = "default_tau")]
    pub parallel_tau: f64,
    #[serde(default)]
    pub unit: SizeUnit,
    #[serde(default)]
    pub seed: u64,
}

impl MixerConfig {
    pub fn new(strategy: MixStrategy, target_size: Option<usize>, seed: u64) -> Self {
        MixerConfig {
            strategy,
            parallel_ratio: 0.0,
            target_size,
            mono_tau: DEFAULT_CPT_TAU,
            parallel_tau: DEFAULT_CPT_TAU,
            unit: SizeUnit::Examples,
            seed,
        }
    }

    pub fn with_ratio(mut self, ratio: f64) -> Self {
        self.parallel_ratio = ratio;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Mono,
    ParallelConcat,
    ParallelSrcSide,
    ParallelTgtSide,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Mono => "mono",
            Origin::ParallelConcat => "parallel_concat",
            Origin::ParallelSrcSide => "parallel_src_side",
            Origin::ParallelTgtSide => "parallel_tgt_side",
        }
    }
}

/// One pretraining line with its provenance.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CptSequence {
    pub text: String,
    pub origin: Origin,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lang: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<String>,
}

impl CptSequence {
    fn single(text: &str, origin: Origin, lang: &str) -> Self {
        CptSequence {
            text: text.to_string(),
            origin,
            lang: Some(lang.to_string()),
            pair: None,
        }
    }

    /// Language the line counts towards: its own language, or the target
    /// language for concatenated pairs.
    pub fn report_lang(&self) -> &str {
        match (&self.lang, &self.pair) {
            (Some(l), _) => l,
            (None, Some(p)) => p.split_once('-').map_or(p.as_str(), |(_, t)| t),
            (None, None) => "",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CptError {
    #[error("parallel_ratio must lie in [0, 1], got {0}")]
    InvalidRatio(f64),
    #[error("builder called with strategy {got:?}, expected {expected:?}")]
    WrongStrategy { expected: MixStrategy, got: MixStrategy },
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Tokenize(#[from] TokenizeError),
}

/// Built corpus plus its manifest (inputs digests are filled in by the caller).
#[derive(Debug, Clone)]
pub struct CptOutput {
    pub sequences: Vec<CptSequence>,
    pub manifest: DatasetManifest,
}

/// `"<spa>: hola\n<aym>: kamisaraki"`
pub fn format_concat(pair: &ParallelRecord) -> CptSequence {
    CptSequence {
        text: format!("<{}>: {}\n<{}>: {}", pair.src_lang, pair.src, pair.tgt_lang, pair.tgt),
        origin: Origin::ParallelConcat,
        lang: None,
        pair: Some(pair.pair_key()),
    }
}

/// Splits a concatenated line back into `(src_lang, src, tgt_lang, tgt)`.
pub fn parse_concat(text: &str) -> Option<(&str, &str, &str, &str)> {
    let (first, second) = text.split_once('\n')?;
    fn side(s: &str) -> Option<(&str, &str)> {
        s.strip_prefix('<')?.split_once(">: ")
    }
    let (sl, s) = side(first)?;
    let (tl, t) = side(second)?;
    Some((sl, s, tl, t))
}

/// Builds CPT corpora from monolingual and parallel records.
pub struct Mixer<'a> {
    config: MixerConfig,
    counter: &'a dyn TokenCounter,
}

impl<'a> Mixer<'a> {
    pub fn new(config: MixerConfig) -> Mixer<'static> {
        Mixer {
            config,
            counter: &WhitespaceCounter,
        }
    }

    /// Counter used to measure language sizes when `unit` is `tokens`.
    pub fn with_counter<'b>(self, counter: &'b dyn TokenCounter) -> Mixer<'b> {
        Mixer {
            config: self.config,
            counter,
        }
    }

    pub fn config(&self) -> &MixerConfig {
        &self.config
    }

    /// Dispatches on the configured strategy.
    pub fn build(&self, mono: &[MonoRecord], parallel: &[ParallelRecord]) -> Result<CptOutput, CptError> {
        match self.config.strategy {
            MixStrategy::AllMono => self.build_all_mono(mono, parallel),
            MixStrategy::MonoParallelConcat => self.build_concat(mono, parallel),
            MixStrategy::MonoParallelSeparate => self.build_separate(mono, parallel),
        }
    }

    fn expect(&self, expected: MixStrategy) -> Result<(), CptError> {
        if self.config.strategy == expected {
            Ok(())
        } else {
            Err(CptError::WrongStrategy {
                expected,
                got: self.config.strategy,
            })
        }
    }

    pub fn build_all_mono(&self, mono: &[MonoRecord], parallel: &[ParallelRecord]) -> Result<CptOutput, CptError> {
        self.expect(MixStrategy::AllMono)?;
        let pairs: Vec<&ParallelRecord> = parallel.iter().collect();
        let (lines, alloc) = self.mono_portion(mono, &pairs, false, self.config.target_size)?;
        Ok(self.finish(lines, Some(alloc), None, Vec::new()))
    }

    pub fn build_separate(&self, mono: &[MonoRecord], parallel: &[ParallelRecord]) -> Result<CptOutput, CptError> {
        self.expect(MixStrategy::MonoParallelSeparate)?;
        let pairs: Vec<&ParallelRecord> = parallel.iter().collect();
        let (lines, alloc) = self.mono_portion(mono, &pairs, true, self.config.target_size)?;
        Ok(self.finish(lines, Some(alloc), None, Vec::new()))
    }

    pub fn build_concat(&self, mono: &[MonoRecord], parallel: &[ParallelRecord]) -> Result<CptOutput, CptError> {
        self.expect(MixStrategy::MonoParallelConcat)?;
        let r = self.config.parallel_ratio;
        if !(0.0..=1.0).contains(&r) {
            return Err(CptError::InvalidRatio(r));
        }
        let total = self.config.target_size.unwrap_or(mono.len() + parallel.len());
        let wanted = ratio_count(r, total);

        // group pairs by direction, in stored order
        let mut groups: BTreeMap<String, Vec<(usize, &ParallelRecord)>> = BTreeMap::new();
        for (i, p) in parallel.iter().enumerate() {
            groups.entry(p.pair_key()).or_default().push((i, p));
        }
        let mut warnings = Vec::new();
        let mut concat = Vec::new();
        let mut leftover = Vec::new();
        let mut parallel_alloc = LanguageAllocation::default();
        if !groups.is_empty() {
            let sizes = self.sizes(&groups, |(_, p)| vec![p.src.as_str(), p.tgt.as_str()])?;
            let probs = sampling::temperature_distribution(&sizes, self.config.parallel_tau)?;
            let caps = groups.iter().map(|(k, v)| (k.clone(), v.len())).collect();
            let counts = sampling::allocate_capped(&probs, &caps, wanted);
            for (key, members) in &groups {
                let mut order: Vec<usize> = (0..members.len()).collect();
                seed::shuffle(&mut order, self.config.seed, &format!("cpt/concat/{key}"));
                let take = counts.get(key).copied().unwrap_or(0);
                for (i, &idx) in order.iter().enumerate() {
                    let (global, p) = members[idx];
                    if i < take {
                        concat.push(format_concat(p));
                    } else {
                        leftover.push((global, p));
                    }
                }
            }
            parallel_alloc = LanguageAllocation {
                probabilities: probs,
                counts,
            };
        }
        if concat.len() < wanted {
            warnings.push(format!(
                "parallel shortfall: {} concatenated pairs requested, only {} available",
                wanted,
                concat.len()
            ));
        }
        // leftover pairs keep their stored order so r = 0 reproduces all_mono exactly
        leftover.sort_by_key(|(i, _)| *i);
        let leftover: Vec<&ParallelRecord> = leftover.into_iter().map(|(_, p)| p).collect();

        let mono_target = self.config.target_size.map(|n| n - concat.len().min(n));
        let (mut lines, mono_alloc) = self.mono_portion(mono, &leftover, false, mono_target)?;
        let mut all = concat;
        all.append(&mut lines);
        Ok(self.finish(all, Some(mono_alloc), Some(parallel_alloc), warnings))
    }

    fn sizes<T>(
        &self,
        groups: &BTreeMap<String, Vec<T>>,
        texts: impl Fn(&T) -> Vec<&str>,
    ) -> Result<BTreeMap<String, f64>, CptError> {
        let mut out = BTreeMap::new();
        for (k, v) in groups {
            let size = match self.config.unit {
                SizeUnit::Examples => v.len() as f64,
                SizeUnit::Tokens => {
                    let mut n = 0usize;
                    for item in v {
                        for t in texts(item) {
                            n += self.counter.count(t)?;
                        }
                    }
                    // a language whose text yields no tokens still gets a minimal weight
                    n.max(1) as f64
                }
            };
            out.insert(k.clone(), size);
        }
        Ok(out)
    }

    /// Pair sides plus temperature-sampled monolingual records.
    ///
    /// With a target size, every pair side is kept once and the remaining
    /// slots are filled from the monolingual pool (or from the sides
    /// themselves when there is no monolingual data). Sides alone are
    /// down-sampled only when they exceed the target.
    fn mono_portion(
        &self,
        mono: &[MonoRecord],
        pairs: &[&ParallelRecord],
        with_src: bool,
        target: Option<usize>,
    ) -> Result<(Vec<CptSequence>, LanguageAllocation), CptError> {
        let mut mono_pool: BTreeMap<String, Vec<CptSequence>> = BTreeMap::new();
        for m in mono {
            mono_pool
                .entry(m.lang.clone())
                .or_default()
                .push(CptSequence::single(&m.text, Origin::Mono, &m.lang));
        }
        let mut sides = Vec::new();
        for p in pairs {
            if with_src {
                sides.push(CptSequence::single(&p.src, Origin::ParallelSrcSide, &p.src_lang));
            }
            sides.push(CptSequence::single(&p.tgt, Origin::ParallelTgtSide, &p.tgt_lang));
        }
        let group = |items: Vec<CptSequence>| {
            let mut g: BTreeMap<String, Vec<CptSequence>> = BTreeMap::new();
            for s in items {
                g.entry(s.report_lang().to_string()).or_default().push(s);
            }
            g
        };
        let sample = |pool: &BTreeMap<String, Vec<CptSequence>>, n: Option<usize>, label: &str| {
            if pool.is_empty() {
                return Ok((Vec::new(), LanguageAllocation::default()));
            }
            let sizes = self.sizes(pool, |s| vec![s.text.as_str()])?;
            let cfg = sampling::SamplingConfig {
                tau: self.config.mono_tau,
                target_size: n,
                seed: seed::derive_seed(self.config.seed, label),
                unit: self.config.unit,
            };
            Ok::<_, CptError>(sampling::balance(pool, &sizes, &cfg)?)
        };

        let Some(n) = target else {
            let mut pool = mono_pool;
            for (lang, mut v) in group(sides) {
                pool.entry(lang).or_default().append(&mut v);
            }
            return sample(&pool, None, "cpt/mono");
        };
        if sides.len() >= n {
            return sample(&group(sides), Some(n), "cpt/sides");
        }
        let rest = n - sides.len();
        let (mut fill, mut alloc) = if mono_pool.is_empty() {
            sample(&group(sides.clone()), Some(rest), "cpt/sides")?
        } else {
            sample(&mono_pool, Some(rest), "cpt/mono")?
        };
        for s in &sides {
            *alloc.counts.entry(s.report_lang().to_string()).or_insert(0) += 1;
        }
        sides.append(&mut fill);
        Ok((sides, alloc))
    }

    fn finish(
        &self,
        mut lines: Vec<CptSequence>,
        mono_alloc: Option<LanguageAllocation>,
        parallel_alloc: Option<LanguageAllocation>,
        mut warnings: Vec<String>,
    ) -> CptOutput {
        seed::shuffle(&mut lines, self.config.seed, "cpt/global");
        let mut manifest = DatasetManifest::new(self.config.strategy.manifest_strategy(), self.config.seed, &self.config);
        manifest.record_count = lines.len() as u64;
        for l in &lines {
            manifest.bump(format!("origin:{}", l.origin.as_str()), 1);
            manifest.bump(format!("lang:{}", l.report_lang()), 1);
        }
        if lines.is_empty() {
            warnings.push("no input records: emitted an empty corpus".to_string());
        }
        if let Some(t) = self.config.target_size {
            if lines.len() < t {
                warnings.push(format!("emitted {} lines, fewer than target_size {t}", lines.len()));
            }
        }
        manifest.warnings = warnings;
        manifest
            .notes
            .insert("concat_format".into(), CONCAT_FORMAT.to_string());
        if let Some(a) = mono_alloc {
            manifest.notes.insert(
                "mono_allocation".into(),
                serde_json::to_string(&a.counts).expect("serializable"),
            );
        }
        if let Some(a) = parallel_alloc {
            manifest.notes.insert(
                "concat_allocation".into(),
                serde_json::to_string(&a.counts).expect("serializable"),
            );
        }
        CptOutput {
            sequences: lines,
            manifest,
        }
    }
}

/// `floor(r * n)`, robust to representation error just below an integer.
pub fn ratio_count(r: f64, n: usize) -> usize {
    let x = r * n as f64;
    let k = x.round();
    let v = if (x - k).abs() <= 1e-9 * x.abs().max(1.0) { k } else { x.floor() };
    (v.max(0.0) as usize).min(n)
}

/// Raw-text rendering: one sequence per record, records separated by a blank line.
pub fn to_raw_text(sequences: &[CptSequence]) -> Vec<u8> {
    let mut out = Vec::new();
    for (i, s) in sequences.iter().enumerate() {
        if i > 0 {
            out.push(b'\n');
        }
        out.extend_from_slice(s.text.as_bytes());
        out.push(b'\n');
    }
    out
}
