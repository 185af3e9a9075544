use std::collections::BTreeMap;
use std::fmt::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bootstrap::{bootstrap, BootstrapResult};
use super::chrf::{chrf_corpus, ChrfParams};
use super::{check_unique, EvalError, EvalSet};

/// Named language groups, e.g. high- and low-resource.
pub type Groups = BTreeMap<String, Vec<String>>;

/// The American language groups: the three languages with the most
/// monolingual data against the rest.
pub fn american_groups() -> Groups {
    let mut g = Groups::new();
    g.insert("HRL".into(), ["aym", "grn", "quy"].map(String::from).to_vec());
    g.insert(
        "LRL".into(),
        ["bzd", "cni", "ctp", "hch", "nhe", "oto", "shp", "tar"]
            .map(String::from)
            .to_vec(),
    );
    g
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub params: ChrfParams,
    pub per_language: BTreeMap<String, f64>,
    pub macro_average: f64,
    pub groups: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<BootstrapResult>,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Macro averages over all languages and over each group. Groups must name
/// only scored languages and must not overlap.
pub fn group_report(
    per_language: &BTreeMap<String, f64>,
    groups: &Groups,
    params: ChrfParams,
) -> Result<EvalReport, EvalError> {
    let mut owner: BTreeMap<&str, &str> = BTreeMap::new();
    let mut group_scores = BTreeMap::new();
    for (name, langs) in groups {
        for lang in langs {
            if !per_language.contains_key(lang) {
                return Err(EvalError::MissingGroupLanguage {
                    group: name.clone(),
                    lang: lang.clone(),
                });
            }
            if let Some(first) = owner.insert(lang, name) {
                if first != name {
                    return Err(EvalError::OverlappingGroups {
                        lang: lang.clone(),
                        first: first.to_string(),
                        second: name.clone(),
                    });
                }
            }
        }
        group_scores.insert(name.clone(), mean(langs.iter().map(|l| per_language[l])));
    }
    Ok(EvalReport {
        params,
        per_language: per_language.clone(),
        macro_average: mean(per_language.values().copied()),
        groups: group_scores,
        bootstrap: None,
    })
}

/// Scores every set, aggregates by group and optionally bootstraps the
/// macro average.
pub fn evaluate(
    sets: &[EvalSet],
    params: &ChrfParams,
    groups: &Groups,
    resamples: Option<usize>,
    seed: u64,
) -> Result<EvalReport, EvalError> {
    check_unique(sets)?;
    let scores: Vec<f64> = sets
        .par_iter()
        .map(|s| chrf_corpus(s, params))
        .collect::<Result<_, _>>()?;
    let per_language = sets.iter().map(|s| s.lang.clone()).zip(scores).collect();
    let mut report = group_report(&per_language, groups, *params)?;
    if let Some(b) = resamples {
        report.bootstrap = Some(bootstrap(sets, params, b, seed)?);
    }
    Ok(report)
}

impl EvalReport {
    /// Plain-text table with one row per language, then the averages.
    pub fn to_table(&self) -> String {
        let width = self
            .per_language
            .keys()
            .chain(self.groups.keys())
            .map(|k| k.chars().count())
            .chain([5])
            .max()
            .unwrap_or(5);
        let mut out = String::new();
        let _ = writeln!(out, "{:<width$}  {:>7}", "lang", "chrF++");
        for (lang, score) in &self.per_language {
            let _ = writeln!(out, "{lang:<width$}  {score:>7.2}");
        }
        let _ = writeln!(out, "{:<width$}  {:>7.2}", "all", self.macro_average);
        for (name, score) in &self.groups {
            let _ = writeln!(out, "{name:<width$}  {score:>7.2}");
        }
        if let Some(b) = &self.bootstrap {
            let _ = writeln!(
                out,
                "bootstrap mean {:.2}, std {:.2} ({} resamples, seed {})",
                b.mean, b.std_dev, b.resamples, b.seed
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scores(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(l, s)| (l.to_string(), *s)).collect()
    }

    #[test]
    fn group_averages() {
        let s = scores(&[("a", 10.0), ("b", 20.0), ("c", 60.0)]);
        let mut g = Groups::new();
        g.insert("hi".into(), vec!["c".into()]);
        g.insert("lo".into(), vec!["a".into(), "b".into()]);
        let r = group_report(&s, &g, ChrfParams::default()).unwrap();
        assert_eq!(r.macro_average, 30.0);
        assert_eq!(r.groups["hi"], 60.0);
        assert_eq!(r.groups["lo"], 15.0);
        assert!(r
            .to_table()
            .lines()
            .any(|l| l.split_whitespace().eq(["lo", "15.00"])));
    }

    #[test]
    fn missing_group_language() {
        let s = scores(&[("a", 10.0)]);
        let mut g = Groups::new();
        g.insert("x".into(), vec!["zz".into()]);
        assert!(matches!(
            group_report(&s, &g, ChrfParams::default()),
            Err(EvalError::MissingGroupLanguage { .. })
        ));
    }

    #[test]
    fn overlapping_groups() {
        let s = scores(&[("a", 10.0)]);
        let mut g = Groups::new();
        g.insert("x".into(), vec!["a".into()]);
        g.insert("y".into(), vec!["a".into()]);
        assert!(matches!(
            group_report(&s, &g, ChrfParams::default()),
            Err(EvalError::OverlappingGroups { .. })
        ));
    }
}
