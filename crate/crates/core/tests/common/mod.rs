#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use lowres_mt::{MonoRecord, ParallelRecord};

pub mod pipeline;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn expected() -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(fixture("expected.json")).unwrap()).unwrap()
}

pub fn map<V: Clone>(kv: &[(&str, V)]) -> BTreeMap<String, V> {
    kv.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// Monolingual token counts (millions) of the American languages.
pub fn american_token_sizes() -> BTreeMap<String, f64> {
    map(&[
        ("aym", 23.4),
        ("bzd", 2.6),
        ("cni", 2.2),
        ("ctp", 5.4),
        ("grn", 37.6),
        ("hch", 3.5),
        ("nhe", 32.1),
        ("oto", 23.6),
        ("quy", 45.1),
        ("shp", 3.3),
        ("tar", 2.3),
    ])
}

/// Per-language chrF++ of the multilingual MT model on the American test sets.
pub fn multilingual_mt_scores() -> BTreeMap<String, f64> {
    map(&[
        ("aym", 20.2),
        ("bzd", 15.8),
        ("cni", 18.0),
        ("ctp", 26.0),
        ("grn", 25.8),
        ("hch", 21.6),
        ("nhe", 18.2),
        ("oto", 11.2),
        ("quy", 24.9),
        ("shp", 14.8),
        ("tar", 9.5),
    ])
}

/// Hamilton apportionment computed in log space with a full sort, kept apart
/// from the library code path on purpose.
pub fn reference_apportionment(sizes: &BTreeMap<String, f64>, tau: f64, total: usize) -> BTreeMap<String, usize> {
    let max_ln = sizes.values().map(|d| d.ln()).fold(f64::MIN, f64::max);
    let w: Vec<(String, f64)> = sizes
        .iter()
        .map(|(l, d)| (l.clone(), ((d.ln() - max_ln) / tau).exp()))
        .collect();
    let z: f64 = w.iter().map(|(_, x)| x).sum();
    let mut rows: Vec<(String, usize, f64)> = w
        .iter()
        .map(|(l, x)| {
            let q = total as f64 * x / z;
            (l.clone(), q.floor() as usize, q - q.floor())
        })
        .collect();
    let left = total - rows.iter().map(|r| r.1).sum::<usize>();
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| rows[b].2.partial_cmp(&rows[a].2).unwrap().then(rows[a].0.cmp(&rows[b].0)));
    for &i in order.iter().take(left) {
        rows[i].1 += 1;
    }
    rows.into_iter().map(|(l, n, _)| (l, n)).collect()
}

/// Synthetic monolingual corpus: `counts[lang]` distinct sentences per language.
pub fn mono_corpus(counts: &[(&str, usize)]) -> Vec<MonoRecord> {
    let mut out = Vec::new();
    for (lang, n) in counts {
        for i in 0..*n {
            out.push(MonoRecord::new(*lang, format!("{lang} mono sentence {i}"), "synthetic"));
        }
    }
    out
}

/// Synthetic pairs with a recognisable source-side sentinel.
pub fn pairs(src: &str, tgt: &str, n: usize) -> Vec<ParallelRecord> {
    (0..n)
        .map(|i| ParallelRecord::new(src, tgt, format!("SRC-SENTINEL-{src}-{tgt}-{i}"), format!("{tgt} side {i}"), "synthetic"))
        .collect()
}
