//! Loads a small BPE model, segments a few sentences and compares BPE
//! fertility with the whitespace baseline.
//!
//!     cargo run --example fertility_bpe

use std::path::PathBuf;

use lowres_mt::tokenize::fertility;
use lowres_mt::{BpeModel, MonoRecord, WhitespaceCounter};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bpe = BpeModel::load(&fixture("bpe_vocab.tsv"), &fixture("bpe_merges.txt"), true)?;
    println!("vocab {} / merges {}", bpe.vocab_size(), bpe.merges().len());

    let records = vec![
        MonoRecord::new("quy", "allin p'unchay", "demo"),
        MonoRecord::new("quy", "imaynallam kachkanki", "demo"),
        MonoRecord::new("aym", "kamisaraki jilata", "demo"),
        MonoRecord::new("aym", "jallalla marka", "demo"),
    ];
    for r in &records {
        println!("{:<22} -> {:?}", r.text, bpe.encode(&r.text)?);
    }

    for (name, report) in [("bpe", fertility(&records, &bpe)?), ("whitespace", fertility(&records, &WhitespaceCounter)?)] {
        let per: Vec<String> = report
            .per_language
            .iter()
            .map(|(l, f)| format!("{l} {:.2}", f.fertility))
            .collect();
        println!("{name:>10}: {} (average {:.2})", per.join(", "), report.average);
    }
    Ok(())
}
