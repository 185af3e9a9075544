//! Renders MT instructions from bitext and mixes them 50/50 with QA records,
//! then repeats the MT-only set for two epochs.
//!
//!     cargo run --example build_sft_mixture

use std::collections::BTreeMap;

use lowres_mt::sft::{build_mt_dataset, compose_mixture, standard_templates, MixtureComponent, TemplateMode};
use lowres_mt::{LanguageRegistry, MixtureSpec, ParallelRecord, SftRecord, Task};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let registry = LanguageRegistry::bundled();
    let pairs: Vec<ParallelRecord> = (0..400)
        .map(|i| ParallelRecord::new("spa", "aym", format!("frase {i}"), format!("aymar aru {i}"), "demo"))
        .collect();
    let mt = build_mt_dataset(&pairs, &standard_templates(), TemplateMode::Random, 3, &registry)?;
    println!("{}", serde_json::to_string_pretty(&mt[0])?);

    let qa: Vec<SftRecord> = (0..400)
        .map(|i| SftRecord {
            instruction: format!("Qué es el objeto {i}? Answer in Aymara."),
            input: String::new(),
            output: format!("aymar aru {i}"),
            task: Task::Xqa,
            pair: Some("spa-aym".into()),
            lang: None,
            template_id: None,
        })
        .collect();
    let datasets = BTreeMap::from([("mt".to_string(), mt), ("xqa".to_string(), qa)]);

    let component = |dataset: &str, task, count| MixtureComponent {
        dataset: dataset.into(),
        task,
        count: Some(count),
        fraction: None,
    };
    let half = MixtureSpec {
        components: vec![component("mt", Task::Mt, 250), component("xqa", Task::Xqa, 250)],
        total: 500,
        epochs: 1,
        seed: 9,
    };
    let twice = MixtureSpec {
        components: vec![component("mt", Task::Mt, 250)],
        total: 250,
        epochs: 2,
        seed: 9,
    };
    for (name, spec) in [("mt + xqa", half), ("mt x2 epochs", twice)] {
        let (records, manifest) = compose_mixture(&spec, &datasets)?;
        println!("{name}: {} records, counts {:?}", records.len(), manifest.counts);
    }
    Ok(())
}
