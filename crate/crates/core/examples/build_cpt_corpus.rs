//! Builds the three continued-pretraining variants from the same inputs and
//! prints a few lines of each.
//!
//!     cargo run --example build_cpt_corpus

use lowres_mt::cpt::Mixer;
use lowres_mt::{MixStrategy, MixerConfig, MonoRecord, ParallelRecord};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut mono = Vec::new();
    for (lang, n) in [("aym", 300), ("quy", 600)] {
        mono.extend((0..n).map(|i| MonoRecord::new(lang, format!("{lang} text {i}"), "demo")));
    }
    let mut parallel = Vec::new();
    for tgt in ["aym", "quy"] {
        parallel.extend((0..150).map(|i| ParallelRecord::new("spa", tgt, format!("frase {i}"), format!("{tgt} {i}"), "demo")));
    }

    for (strategy, ratio) in [
        (MixStrategy::AllMono, 0.0),
        (MixStrategy::MonoParallelSeparate, 0.0),
        (MixStrategy::MonoParallelConcat, 0.25),
    ] {
        let cfg = MixerConfig::new(strategy, Some(400), 42).with_ratio(ratio);
        let out = Mixer::new(cfg).build(&mono, &parallel)?;
        println!("== {strategy:?} ({} sequences) counts {:?}", out.sequences.len(), out.manifest.counts);
        for s in out.sequences.iter().take(3) {
            println!("   [{:?}] {:?}", s.origin, s.text);
        }
        for w in &out.manifest.warnings {
            println!("   warning: {w}");
        }
    }
    Ok(())
}
