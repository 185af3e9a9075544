//! Shows how the temperature flattens a skewed size distribution and how the
//! resulting budget is split across languages.
//!
//!     cargo run --example temperature_sampling

use std::collections::BTreeMap;

use lowres_mt::sampling::{allocate, balance, temperature_distribution};
use lowres_mt::SamplingConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // monolingual tokens, millions
    let sizes: BTreeMap<String, f64> = [
        ("aym", 23.4), ("bzd", 2.6), ("cni", 2.2), ("ctp", 5.4), ("grn", 37.6), ("hch", 3.5),
        ("nhe", 32.1), ("oto", 23.6), ("quy", 45.1), ("shp", 3.3), ("tar", 2.3),
    ]
    .into_iter()
    .map(|(l, s)| (l.to_string(), s))
    .collect();

    println!("{:>4} {:>7} {:>7} {:>7}", "lang", "tau=1", "tau=30", "tau=80");
    let dists: Vec<_> = [1.0, 30.0, 80.0]
        .iter()
        .map(|&t| temperature_distribution(&sizes, t))
        .collect::<Result<_, _>>()?;
    for lang in sizes.keys() {
        println!("{lang:>4} {:>7.4} {:>7.4} {:>7.4}", dists[0][lang], dists[1][lang], dists[2][lang]);
    }
    println!("10,000 examples at tau=30: {:?}", allocate(&dists[1], 10_000));

    // drawing from a toy corpus: the small language is cycled, not dropped
    let corpus: BTreeMap<String, Vec<String>> = [("quy", 900), ("tar", 10)]
        .into_iter()
        .map(|(l, n)| (l.to_string(), (0..n).map(|i| format!("{l}-{i}")).collect()))
        .collect();
    let toy_sizes = corpus.iter().map(|(l, v)| (l.clone(), v.len() as f64)).collect();
    let (drawn, alloc) = balance(&corpus, &toy_sizes, &SamplingConfig::new(2.0, Some(100), 7))?;
    println!("tau=2 over {{900, 10}}: {:?}, first five {:?}", alloc.counts, &drawn[..5]);
    Ok(())
}
