use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chrf::{f_score, segment_stats, ChrfParams, ChrfStats};
use super::{check_unique, EvalError, EvalSet};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    pub mean: f64,
    /// Population standard deviation of the resampled macro averages.
    pub std_dev: f64,
    pub resamples: usize,
    pub seed: u64,
}

/// Resamples segments with replacement within each language, rescoring the
/// macro-averaged corpus chrF++ each time.
///
/// Resample `b` of language `l` draws from a generator seeded by
/// `derive_seed(seed ^ b, l)`, so results do not depend on the thread count.
pub fn bootstrap(
    sets: &[EvalSet],
    params: &ChrfParams,
    resamples: usize,
    seed: u64,
) -> Result<BootstrapResult, EvalError> {
    params.validate()?;
    if resamples == 0 {
        return Err(EvalError::NoResamples);
    }
    check_unique(sets)?;
    let per_segment: Vec<Vec<ChrfStats>> = sets
        .iter()
        .map(|set| {
            set.validate()?;
            Ok(set
                .hypotheses
                .par_iter()
                .zip(&set.references)
                .map(|(h, r)| segment_stats(h, r, params))
                .collect())
        })
        .collect::<Result<_, EvalError>>()?;

    let scores: Vec<f64> = (1..=resamples as u64)
        .into_par_iter()
        .map(|b| {
            let mut sum = 0.0;
            for (set, stats) in sets.iter().zip(&per_segment) {
                let mut rng = seed::rng_for(seed ^ b, &set.lang);
                let mut total = ChrfStats::zeros(params);
                for _ in 0..stats.len() {
                    total += &stats[rng.random_range(0..stats.len())];
                }
                sum += f_score(&total, params);
            }
            sum / sets.len().max(1) as f64
        })
        .collect();

    // shifted by the first score so identical resamples give exactly zero
    let n = scores.len() as f64;
    let shift = scores[0];
    let d_mean = scores.iter().map(|s| s - shift).sum::<f64>() / n;
    let var = (scores.iter().map(|s| (s - shift - d_mean).powi(2)).sum::<f64>() / n).max(0.0);
    let mean = shift + d_mean;
    Ok(BootstrapResult {
        mean,
        std_dev: var.sqrt(),
        resamples,
        seed,
    })
}
