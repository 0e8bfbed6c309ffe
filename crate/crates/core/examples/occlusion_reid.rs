//! Re-identification across an occlusion gap.
//!
//! Object 0 disappears for frames 10-14 while a look-alike of the same size
//! shows up and stays. With score-gated momentum the memory query keeps the
//! object's identity through the gap; replacing the memory with the latest
//! matched proposal every frame hands the track over to the look-alike.
//!
//!     cargo run -p memtrack --example occlusion_reid

use std::collections::BTreeSet;

use memtrack::synth::{generate_fixture, load_fixture_spec};
use memtrack::tracker::{track_video, TrackerConfig};

fn main() -> memtrack::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/occlusion.json");
    let fixture = generate_fixture(&load_fixture_spec(path)?)?;
    let frames = &fixture.videos[0].frames;

    let mut runs: Vec<(String, TrackerConfig)> = [0.3, 0.4, 0.5, 0.6, 0.7, 0.8]
        .into_iter()
        .map(|alpha| {
            let cfg = TrackerConfig {
                alpha,
                ..TrackerConfig::default()
            };
            (format!("gated, alpha {alpha:.1}"), cfg)
        })
        .collect();
    runs.push((
        "consecutive-frame baseline".into(),
        TrackerConfig {
            alpha: 1.0,
            gate_with_object_score: false,
            ..TrackerConfig::default()
        },
    ));

    for (label, cfg) in runs {
        let (tracklets, _) = track_video(frames, &cfg)?;
        let ids = fixture.object_track_ids(0, 0, &tracklets);
        let distinct: BTreeSet<usize> = ids.iter().copied().collect();
        println!("{label:<28} track ids {distinct:?}");
    }
    Ok(())
}
