//! Generates cross-lingual QA records against an in-memory mock endpoint.
//! One pair gets a blank generation and is skipped.
//!
//!     cargo run --example synth_xqa_mock

use lowres_mt::xqa::{build_xqa_dataset, MockClient, XqaConfig};
use lowres_mt::{LanguageRegistry, ParallelRecord};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pairs = vec![
        ParallelRecord::new("spa", "quy", "El sol sale por la mañana.", "Intiqa tutamantam lluqsimun.", "demo"),
        ParallelRecord::new("spa", "aym", "La casa es grande.", "Utax jach'awa.", "demo"),
        ParallelRecord::new("spa", "grn", "El río está lejos.", "Ysyry mombyry.", "demo"),
    ];
    let mut client = MockClient::new();
    client.insert_for_input(&pairs[0].src, "¿Cuándo sale el sol?\nextra line that is dropped");
    client.insert_for_input(&pairs[1].src, "¿Cómo es la casa?");
    client.insert_for_input(&pairs[2].src, "   ");

    let cfg = XqaConfig::default();
    let (records, manifest) = build_xqa_dataset(&pairs, &client, &cfg, &LanguageRegistry::bundled())?;
    for r in &records {
        println!("{}", serde_json::to_string(r)?);
    }
    println!("kept {}, skipped {:?}", records.len(), manifest.skipped);
    Ok(())
}
