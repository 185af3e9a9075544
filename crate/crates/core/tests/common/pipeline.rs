use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::process::{Command, Output};

use super::fixture;

pub const BIN: &str = env!("CARGO_BIN_EXE_lowres-mt");

pub fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .env_remove("LOWRES_MT_ENDPOINT")
        .output()
        .unwrap()
}

pub fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// Inputs shared by every pipeline run, written with identical relative paths.
pub fn prepare(dir: &Path) {
    let copy = |from: &str, to: &str| std::fs::copy(fixture(from), dir.join(to)).unwrap();
    copy("mono_10k.txt", "quy.txt");
    copy("bpe_vocab.tsv", "vocab.tsv");
    copy("bpe_merges.txt", "merges.txt");
    copy("xqa_pairs_100.jsonl", "xqa_pairs.jsonl");
    copy("xqa_mock.jsonl", "xqa_mock.jsonl");
    copy("general_1000.jsonl", "aya.jsonl");

    let mut aym = String::new();
    for i in 0..3000 {
        writeln!(aym, "aymara monolingual line {i}").unwrap();
    }
    std::fs::write(dir.join("aym.txt"), aym).unwrap();
    let mut tsv = String::new();
    for i in 0..800 {
        writeln!(tsv, "frase {i}\taymar aru {i}").unwrap();
    }
    std::fs::write(dir.join("spa-aym.tsv"), tsv).unwrap();
    let mut xqa = String::new();
    for i in 0..300 {
        let rec = serde_json::json!({
            "instruction": format!("What is item {i}? Answer in Aymara."),
            "input": "",
            "output": format!("aymar aru {i}"),
            "task": "xqa",
            "pair": "spa-aym",
        });
        writeln!(xqa, "{rec}").unwrap();
    }
    std::fs::write(dir.join("xqa_pool.jsonl"), xqa).unwrap();

    let parity: serde_json::Value = serde_json::from_slice(&std::fs::read(fixture("chrf_parity.json")).unwrap()).unwrap();
    let segs = parity["segments"].as_array().unwrap();
    let (mut h1, mut r1, mut h2, mut r2) = (String::new(), String::new(), String::new(), String::new());
    for (i, s) in segs.iter().enumerate() {
        let (h, r) = (s["hyp"].as_str().unwrap(), s["ref"].as_str().unwrap());
        if h.contains(['\n', '\r']) || r.contains(['\n', '\r']) {
            continue;
        }
        let (hb, rb) = if i % 2 == 0 { (&mut h1, &mut r1) } else { (&mut h2, &mut r2) };
        writeln!(hb, "{h}").unwrap();
        writeln!(rb, "{r}").unwrap();
    }
    for (name, body) in [("aym.hyp", h1), ("aym.ref", r1), ("quy.hyp", h2), ("quy.ref", r2)] {
        std::fs::write(dir.join(name), body).unwrap();
    }
    std::fs::write(
        dir.join("sets.json"),
        r#"[{"lang":"aym","hyp":"aym.hyp","ref":"aym.ref"},{"lang":"quy","hyp":"quy.hyp","ref":"quy.ref"}]"#,
    )
    .unwrap();
    std::fs::write(
        dir.join("mt_xqa_mixture.json"),
        r#"{
  "components": [
    {"dataset": "mt", "task": "mt", "count": 250},
    {"dataset": "xqa", "task": "xqa", "count": 250}
  ],
  "total": 500,
  "seed": 5,
  "datasets": {
    "mt": {"kind": "mt", "inputs": ["par.jsonl"]},
    "xqa": {"kind": "sft", "path": "xqa_pool.jsonl"}
  },
  "output": "sft.jsonl"
}"#,
    )
    .unwrap();
}

/// Runs every subcommand once; returns all files in the directory.
pub fn pipeline(dir: &Path, jobs: &str) -> BTreeMap<String, Vec<u8>> {
    prepare(dir);
    let go = |args: &[&str]| {
        let mut v = vec!["--jobs", jobs];
        v.extend_from_slice(args);
        ok(dir, &v)
    };
    go(&["ingest-mono", "--input", "quy.txt", "--lang", "quy", "-o", "quy.jsonl"]);
    go(&["ingest-mono", "--input", "aym.txt", "--lang", "aym", "-o", "aym.jsonl"]);
    go(&["ingest-parallel", "--tsv", "spa-aym.tsv", "--src-lang", "spa", "--tgt-lang", "aym", "-o", "par.jsonl"]);
    go(&[
        "stats", "--mono", "quy.jsonl", "--mono", "aym.jsonl", "--parallel", "par.jsonl", "--bpe-vocab", "vocab.tsv",
        "--bpe-merges", "merges.txt", "--byte-fallback", "-o", "stats.json",
    ]);
    for (strategy, out) in [("concat", "cpt_concat.jsonl"), ("all-mono", "cpt_mono.jsonl"), ("separate", "cpt_sep.txt")] {
        go(&[
            "build-cpt", "--mono", "quy.jsonl", "--mono", "aym.jsonl", "--parallel", "par.jsonl", "--strategy", strategy,
            "--parallel-ratio", "0.5", "--tau", "30", "--size", "1000", "--seed", "7", "--format",
            if out.ends_with(".txt") { "raw" } else { "jsonl" }, "-o", out,
        ]);
    }
    go(&["build-cpt", "--mono", "aym.jsonl", "--strategy", "all-mono", "--unit", "tokens", "--bpe-vocab",
        "vocab.tsv", "--bpe-merges", "merges.txt", "--byte-fallback", "--size", "50", "-o", "cpt_tokens.jsonl"]);
    go(&["synth-xqa", "--pairs", "xqa_pairs.jsonl", "--mock", "xqa_mock.jsonl", "--concurrency", "6", "-o", "xqa.jsonl"]);
    go(&["build-sft", "--spec", "mt_xqa_mixture.json"]);
    go(&["evaluate", "--manifest", "sets.json", "--bootstrap", "1000", "--seed", "1", "-o", "report.json"]);
    go(&["report", "--input", "report.json", "-o", "report.txt"]);

    let mut files = BTreeMap::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        files.insert(p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap());
    }
    files
}
