//! Scores two small test sets with chrF++, groups them and bootstraps the
//! macro average.
//!
//!     cargo run --example evaluate_chrf

use std::collections::BTreeMap;

use lowres_mt::eval::{chrf_segment, evaluate};
use lowres_mt::{ChrfParams, EvalSet};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ChrfParams::default();
    println!("segment: {:.2}", chrf_segment("the cat sat", "the cat sat on the mat", &params));

    let sets = vec![
        EvalSet::new(
            "aym",
            vec!["kamisaraki jilata".into(), "suma uru".into(), "jallalla".into()],
            vec!["kamisaraki jilatanaka".into(), "suma urukipan".into(), "jallalla".into()],
        ),
        EvalSet::new(
            "quy",
            vec!["allin p'unchaw".into(), "imaynalla kachkanki".into()],
            vec!["allin p'unchay".into(), "imaynallam kachkanki".into()],
        ),
    ];
    let groups = BTreeMap::from([
        ("andes".to_string(), vec!["aym".to_string(), "quy".to_string()]),
    ]);
    let report = evaluate(&sets, &params, &groups, Some(1000), 1)?;
    print!("{}", report.to_table());
    Ok(())
}
