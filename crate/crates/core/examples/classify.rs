//! Open-vocabulary classification of tracks.
//!
//! Memory queries go through the class head and are scored against the
//! category text embeddings with a temperature-scaled cosine and a sigmoid.
//! The averaging baseline instead averages per-frame proposal scores.
//!
//!     cargo run -p memtrack --example classify

use memtrack::classifier::{classify_average, classify_tracks, ClassifierConfig, TemperatureMode};
use memtrack::synth::{generate_fixture, FixtureSpec};
use memtrack::tracker::{track_video, TrackerConfig};

fn argmax(scores: &[f64]) -> usize {
    (0..scores.len()).fold(0, |b, j| if scores[j] > scores[b] { j } else { b })
}

fn main() -> memtrack::Result<()> {
    let mut spec = FixtureSpec::simple(9, 3, 5, 12);
    spec.noise_sigma = 0.1;
    let fixture = generate_fixture(&spec)?;
    let vocab = &fixture.vocabulary;
    let frames = &fixture.videos[0].frames;
    println!("prompt for category 0: {:?}", vocab.prompt(0));

    let (tracklets, bank) = track_video(frames, &TrackerConfig::default())?;
    for mode in [TemperatureMode::Multiply, TemperatureMode::Divide] {
        let cfg = ClassifierConfig {
            temperature_mode: mode,
            ..ClassifierConfig::default()
        };
        let mut tracks = tracklets.clone();
        classify_tracks(&bank, &mut tracks, &fixture.class_head, vocab, &cfg)?;
        println!("{mode:?} temperature:");
        for t in tracks.iter().filter(|t| t.has_foreground()) {
            let c = argmax(&t.class_scores);
            println!(
                "  track {} -> {} ({:.4})",
                t.track_id,
                vocab.names()[c],
                t.class_scores[c]
            );
        }
    }

    let mut averaged = tracklets.clone();
    classify_average(frames, &mut averaged)?;
    println!("per-frame averaging:");
    for t in averaged.iter().filter(|t| t.has_foreground()) {
        let c = argmax(&t.class_scores);
        println!(
            "  track {} -> {} ({:.4})",
            t.track_id,
            vocab.names()[c],
            t.class_scores[c]
        );
    }
    Ok(())
}
