#![allow(dead_code)]

use std::path::PathBuf;

use ndarray::Array2;
use rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use memtrack::assignment::WeightMatrix;
use memtrack::mask::{Bitmap, RleMask};

/// Values produced by the seed-42 fixture through the default pipeline.
pub const GOLDEN_MAP: f64 = 0.9666666666666667;
pub const GOLDEN_MAP_BASE: f64 = 0.95;
pub const GOLDEN_MAP_NOVEL: f64 = 1.0;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub struct TestRng(Xoshiro256PlusPlus);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(Xoshiro256PlusPlus::seed_from_u64(seed))
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn int(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.0.next_u64() % (hi - lo + 1) as u64) as usize
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    pub fn gaussian(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn gaussian_matrix(&mut self, rows: usize, cols: usize) -> Array2<f64> {
        Array2::from_shape_fn((rows, cols), |_| self.gaussian())
    }

    pub fn weights(&mut self, rows: usize, cols: usize, integer: bool) -> WeightMatrix {
        let data = (0..rows * cols)
            .map(|_| {
                if integer {
                    self.int(0, 4) as f64
                } else {
                    self.range(-1.0, 1.0)
                }
            })
            .collect();
        WeightMatrix::new(rows, cols, data).unwrap()
    }

    /// A bitmap with blobs of varying density so runs are both long and short.
    pub fn bitmap(&mut self, height: u32, width: u32) -> Bitmap {
        let density = self.uniform();
        let stickiness = self.range(0.0, 0.95);
        let mut b = Bitmap::zeros(height, width);
        let mut on = self.chance(density);
        for col in 0..width as usize {
            for row in 0..height as usize {
                if !self.chance(stickiness) {
                    on = self.chance(density);
                }
                b.set(row, col, on);
            }
        }
        b
    }
}

/// Dense pixel-by-pixel intersection of two bitmaps.
pub fn dense_overlap(a: &Bitmap, b: &Bitmap) -> (u64, u64) {
    let (x, y) = (a.as_column_major(), b.as_column_major());
    let inter = x.iter().zip(y).filter(|(p, q)| **p && **q).count() as u64;
    let union = x.iter().zip(y).filter(|(p, q)| **p || **q).count() as u64;
    (inter, union)
}

pub fn is_canonical(mask: &RleMask) -> bool {
    mask.counts().iter().skip(1).all(|&c| c > 0)
}

use memtrack::synth::{FixtureSpec, Lookalike, Occlusion};

/// A small random fixture spec: at most 5 videos, 20 frames and 64x64 pixels.
pub fn random_spec(rng: &mut TestRng, seed: u64) -> FixtureSpec {
    let n_objects = rng.int(1, 4);
    let n_distractors = rng.int(0, 2);
    let spare = rng.int(0, 3);
    let frame_count = rng.int(2, 20);
    let size = [rng.int(12, 64) as u32, rng.int(12, 64) as u32];
    let mut pool: Vec<usize> = (0..rng.int(n_objects, 6)).collect();
    for i in (1..pool.len()).rev() {
        pool.swap(i, rng.int(0, i));
    }
    let mut occlusions = Vec::new();
    if frame_count > 3 && rng.chance(0.5) {
        let start = rng.int(1, frame_count - 2);
        let end = rng.int(start, frame_count - 2);
        occlusions.push(Occlusion {
            object: rng.int(0, n_objects - 1),
            frames: [start, end],
        });
    }
    let mut lookalikes = Vec::new();
    if spare > 0 && rng.chance(0.5) {
        lookalikes.push(Lookalike {
            object: rng.int(0, n_objects - 1),
            from_frame: rng.int(0, frame_count - 1),
            cosine: rng.range(0.0, 0.9),
        });
    }
    FixtureSpec {
        seed,
        videos: rng.int(1, 5),
        n_queries: n_objects + n_distractors + spare,
        n_objects,
        n_distractors,
        frame_count,
        size,
        embed_dim: rng.int(8, 16),
        noise_sigma: rng.range(0.0, 0.6),
        box_size: None,
        max_speed: rng.range(0.0, 3.0),
        n_base: Some(rng.int(0, pool[..n_objects].iter().max().unwrap() + 1)),
        categories: pool[..n_objects].to_vec(),
        occlusions,
        lookalikes,
    }
}
