//! Memory-query tracking of a generated video.
//!
//! Frame 0 initialises one memory slot per proposal. Each later frame is
//! matched to the memory by optimal assignment and folded in with a momentum
//! update weighted by the object score.
//!
//!     cargo run -p memtrack --example track_video

use memtrack::synth::{generate_fixture, FixtureSpec};
use memtrack::tracker::{track_video, Similarity, TrackerConfig};

fn main() -> memtrack::Result<()> {
    let mut spec = FixtureSpec::simple(3, 3, 6, 10);
    spec.noise_sigma = 0.1;
    let fixture = generate_fixture(&spec)?;
    let frames = &fixture.videos[0].frames;

    for similarity in [Similarity::InnerProduct, Similarity::Cosine] {
        let cfg = TrackerConfig {
            similarity,
            ..TrackerConfig::default()
        };
        let (tracklets, bank) = track_video(frames, &cfg)?;
        println!(
            "{similarity:?}: {} slots of dimension {}",
            bank.len(),
            bank.embed_dim()
        );
        for object in 0..spec.n_objects {
            let mut ids = fixture.object_track_ids(0, object, &tracklets);
            ids.dedup();
            println!("  object {object} followed by track(s) {ids:?}");
        }
        for t in tracklets.iter().filter(|t| t.has_foreground()) {
            let area: u64 = t
                .frames
                .iter()
                .flat_map(|f| f.mask.as_ref())
                .map(|m| m.area())
                .sum();
            println!(
                "  track {}: mean object score {:.3}, {} foreground pixels",
                t.track_id, t.mean_object_score, area
            );
        }
    }
    Ok(())
}
