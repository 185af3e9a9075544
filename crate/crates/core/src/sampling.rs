//! Temperature-based language balancing.
//!
//! Sampling is realised deterministically: [`temperature_distribution`] turns
//! per-language sizes into probabilities, [`allocate`] apportions an exact
//! number of examples with the largest-remainder method, and [`draw`] takes
//! that many records per language by cycling through a seeded shuffle.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::seed;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SamplingError {
    #[error("no languages to sample from")]
    Empty,
    #[error("language {lang:?} has non-positive size {size}")]
    NonPositiveSize { lang: String, size: f64 },
    #[error("temperature must be a positive finite number, got {0}")]
    InvalidTau(f64),
    #[error("language {0:?} is allocated examples but has no records")]
    MissingLanguage(String),
}

/// How language sizes are measured.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeUnit {
    #[default]
    Examples,
    Tokens,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingConfig {
    pub tau: f64,
    /// `None` keeps every record exactly once.
    #[serde(default)]
    pub target_size: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub unit: SizeUnit,
}

impl SamplingConfig {
    pub fn new(tau: f64, target_size: Option<usize>, seed: u64) -> Self {
        SamplingConfig {
            tau,
            target_size,
            seed,
            unit: SizeUnit::Examples,
        }
    }

    pub fn validate(&self) -> Result<(), SamplingError> {
        check_tau(self.tau)
    }
}

fn check_tau(tau: f64) -> Result<(), SamplingError> {
    if tau.is_finite() && tau > 0.0 {
        Ok(())
    } else {
        Err(SamplingError::InvalidTau(tau))
    }
}

/// Per-language probabilities and the exact counts realised from them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LanguageAllocation {
    pub probabilities: BTreeMap<String, f64>,
    pub counts: BTreeMap<String, usize>,
}

/// `p_l = q_l^(1/tau) / sum_k q_k^(1/tau)` with `q_l = D_l / sum_k D_k`.
///
/// Since the normaliser cancels, the weights are computed as `D_l^(1/tau)`
/// directly, which keeps results like `sqrt(900) : sqrt(100) = 3 : 1` exact.
/// When that would overflow, weights are rescaled by the largest size.
pub fn temperature_distribution(sizes: &BTreeMap<String, f64>, tau: f64) -> Result<BTreeMap<String, f64>, SamplingError> {
    check_tau(tau)?;
    if sizes.is_empty() {
        return Err(SamplingError::Empty);
    }
    for (lang, &size) in sizes {
        if !(size > 0.0 && size.is_finite()) {
            return Err(SamplingError::NonPositiveSize {
                lang: lang.clone(),
                size,
            });
        }
    }

    let weights: Vec<f64> = if tau == 1.0 {
        sizes.values().copied().collect()
    } else {
        let direct: Vec<f64> = sizes.values().map(|d| d.powf(1.0 / tau)).collect();
        let sum: f64 = direct.iter().sum();
        if sum.is_finite() && direct.iter().all(|w| *w > 0.0) {
            direct
        } else {
            let max = sizes.values().fold(f64::MIN, |a, &b| a.max(b));
            sizes.values().map(|d| ((d.ln() - max.ln()) / tau).exp()).collect()
        }
    };
    let total: f64 = weights.iter().sum();
    Ok(sizes
        .keys()
        .zip(weights)
        .map(|(lang, w)| (lang.clone(), w / total))
        .collect())
}

/// Largest-remainder apportionment of `target` by `probabilities`.
///
/// Each language first gets `floor(target * p_l)`; the leftover units go to
/// the largest fractional remainders, ties broken by ascending language code.
pub fn allocate(probabilities: &BTreeMap<String, f64>, target: usize) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    let mut remainders = Vec::with_capacity(probabilities.len());
    let mut assigned = 0usize;
    for (lang, &p) in probabilities {
        let quota = target as f64 * p;
        let floor = quota.floor();
        let n = (floor as usize).min(target);
        assigned += n;
        counts.insert(lang.clone(), n);
        remainders.push((lang.clone(), quota - floor));
    }
    // ascending code order is already given by the BTreeMap; stable sort keeps it for ties
    remainders.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut leftover = target.saturating_sub(assigned);
    for (lang, _) in remainders.iter().cycle() {
        if leftover == 0 {
            break;
        }
        *counts.get_mut(lang).expect("key exists") += 1;
        leftover -= 1;
    }
    if assigned > target {
        // only reachable through rounding in degenerate inputs; trim from the smallest remainders
        let mut excess = assigned - target;
        for (lang, _) in remainders.iter().rev().cycle() {
            if excess == 0 {
                break;
            }
            let c = counts.get_mut(lang).expect("key exists");
            if *c > 0 {
                *c -= 1;
                excess -= 1;
            }
        }
    }
    counts
}

/// Like [`allocate`], but no language receives more than its cap; the surplus
/// is re-apportioned among the remaining languages by their renormalised
/// probabilities. The total is below `target` only when every cap is reached.
pub fn allocate_capped(
    probabilities: &BTreeMap<String, f64>,
    caps: &BTreeMap<String, usize>,
    target: usize,
) -> BTreeMap<String, usize> {
    let cap = |l: &str| caps.get(l).copied().unwrap_or(0);
    let mut fixed: BTreeMap<String, usize> = BTreeMap::new();
    let mut active: BTreeMap<String, f64> = probabilities.clone();
    let mut remaining = target;
    loop {
        let mass: f64 = active.values().sum();
        if active.is_empty() || remaining == 0 || mass <= 0.0 {
            for l in active.keys() {
                fixed.insert(l.clone(), 0);
            }
            break;
        }
        let norm: BTreeMap<String, f64> = active.iter().map(|(l, p)| (l.clone(), p / mass)).collect();
        let trial = allocate(&norm, remaining);
        let over: Vec<String> = trial
            .iter()
            .filter(|(l, n)| **n > cap(l))
            .map(|(l, _)| l.clone())
            .collect();
        if over.is_empty() {
            fixed.extend(trial);
            break;
        }
        for l in over {
            let c = cap(&l);
            remaining -= c;
            active.remove(&l);
            fixed.insert(l, c);
        }
    }
    fixed
}

/// Takes `counts[l]` records of each language by cycling through a seeded
/// shuffle of that language's records (records repeat only after the language
/// is exhausted), then shuffles the union.
pub fn draw<T: Clone>(
    corpus: &BTreeMap<String, Vec<T>>,
    counts: &BTreeMap<String, usize>,
    seed: u64,
) -> Result<Vec<T>, SamplingError> {
    let mut out = Vec::with_capacity(counts.values().sum());
    for (lang, &n) in counts {
        let records = match corpus.get(lang) {
            Some(r) if !r.is_empty() || n == 0 => r,
            _ => return Err(SamplingError::MissingLanguage(lang.clone())),
        };
        if n == 0 {
            continue;
        }
        let mut order: Vec<usize> = (0..records.len()).collect();
        seed::shuffle(&mut order, seed, &format!("draw/lang/{lang}"));
        out.extend((0..n).map(|i| records[order[i % order.len()]].clone()));
    }
    seed::shuffle(&mut out, seed, "draw/union");
    Ok(out)
}

/// Convenience pipeline: sizes → probabilities → counts → draw.
///
/// With `target_size = None` every record is kept exactly once (only the
/// shuffle applies) and the reported counts are the corpus sizes.
pub fn balance<T: Clone>(
    corpus: &BTreeMap<String, Vec<T>>,
    sizes: &BTreeMap<String, f64>,
    config: &SamplingConfig,
) -> Result<(Vec<T>, LanguageAllocation), SamplingError> {
    config.validate()?;
    let sizes: BTreeMap<String, f64> = sizes
        .iter()
        .filter(|(l, _)| corpus.get(*l).is_some_and(|r| !r.is_empty()))
        .map(|(l, s)| (l.clone(), *s))
        .collect();
    if sizes.is_empty() {
        return Ok((Vec::new(), LanguageAllocation::default()));
    }
    let probabilities = temperature_distribution(&sizes, config.tau)?;
    let counts = match config.target_size {
        Some(n) => allocate(&probabilities, n),
        None => sizes.keys().map(|l| (l.clone(), corpus[l].len())).collect(),
    };
    let records = draw(corpus, &counts, config.seed)?;
    Ok((records, LanguageAllocation { probabilities, counts }))
}
