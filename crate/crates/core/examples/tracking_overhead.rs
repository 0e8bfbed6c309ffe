//! Per-frame cost of the tracking step alone (similarity, assignment and
//! memory update) at 100 queries of dimension 256.
//!
//!     cargo run --release -p memtrack --example tracking_overhead [frames]

use std::time::Instant;

use ndarray::Array2;
use rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use memtrack::mask::RleMask;
use memtrack::tracker::{associate, init_memory, update_memory, FrameProposals, TrackerConfig};

const N: usize = 100;
const D: usize = 256;

fn frame(rng: &mut Xoshiro256PlusPlus, t: usize) -> FrameProposals {
    let mut unit = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    let emb = Array2::from_shape_simple_fn((N, D), || unit() * 2.0 - 1.0);
    let scores = (0..N).map(|_| unit()).collect();
    FrameProposals::new(t, emb, scores, vec![RleMask::empty(1, 1).unwrap(); N]).unwrap()
}

fn main() -> memtrack::Result<()> {
    let frames: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(200);
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(2024);
    let video: Vec<FrameProposals> = (0..=frames).map(|t| frame(&mut rng, t)).collect();
    let cfg = TrackerConfig::default();
    let mut bank = init_memory(&video[0])?;

    let mut samples = Vec::with_capacity(frames);
    for f in &video[1..] {
        let start = Instant::now();
        let perm = associate(&mut bank, f, &cfg)?;
        update_memory(&mut bank, f, &perm, &cfg)?;
        samples.push(start.elapsed().as_secs_f64() * 1e3);
    }
    samples.sort_by(f64::total_cmp);
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let median = samples[samples.len() / 2];
    let p95 = samples[(samples.len() * 95 / 100).min(samples.len() - 1)];
    println!("frames {frames}, N {N}, d {D}");
    println!("mean {mean:.3} ms, median {median:.3} ms, p95 {p95:.3} ms per frame");
    println!(
        "budget 2 ms per frame: {}",
        if mean <= 2.0 { "met" } else { "exceeded" }
    );
    Ok(())
}
