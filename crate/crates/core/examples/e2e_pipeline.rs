//! The full pipeline on a fixture spec: generate, track, classify, export and
//! evaluate, comparing memory-based classification with per-frame averaging.
//!
//!     cargo run -p memtrack --example e2e_pipeline [spec.json]

use memtrack::dataio::RunSettings;
use memtrack::pipeline::{ClassifyMode, Pipeline};
use memtrack::synth::{generate_fixture, load_fixture_spec};

fn main() -> memtrack::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/seed42.json").into());
    let fixture = generate_fixture(&load_fixture_spec(&path)?)?;

    for mode in [ClassifyMode::Memory, ClassifyMode::Average] {
        let pipeline = Pipeline::new(RunSettings::default(), mode);
        let (preds, report) = pipeline.run_fixture(&fixture)?;
        println!("{mode:?}: {} predictions", preds.len());
        print!("{}", report.to_table());
        println!();
    }
    Ok(())
}
