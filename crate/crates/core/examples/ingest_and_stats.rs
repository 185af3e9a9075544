//! Ingests a monolingual file and a TSV bitext, then prints corpus statistics
//! and validation findings.
//!
//!     cargo run --example ingest_and_stats

use std::path::PathBuf;

use lowres_mt::corpus::{compute_stats, ingest_mono, ingest_parallel, validate, ParallelSource};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mono = ingest_mono(&fixture("mono_10k.txt"), "quy", "fixture")?;
    let bitext = ingest_parallel(ParallelSource::Tsv(&fixture("parallel_100.tsv")), "spa", "aym", "fixture")?;
    println!("mono: {} records, {} blank lines skipped", mono.records.len(), mono.blank_skipped);
    println!("parallel: {} pairs, {} blank rows skipped", bitext.records.len(), bitext.blank_skipped);

    let mut stats = compute_stats(&mono.records, None)?;
    stats += &compute_stats(&bitext.records, None)?;
    for (lang, c) in &stats.per_language {
        println!("{lang:>4}  {:>6} segments  {:>7} words", c.segments, c.words);
    }

    let report = validate(&bitext.records);
    println!("validation: {}", serde_json::to_string(&report)?);
    Ok(())
}
