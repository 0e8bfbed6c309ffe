//! Seeded synthetic fixtures and brute-force reference oracles.
//!
//! A fixture is a set of short videos of axis-aligned rectangles moving
//! linearly on a small canvas. Every object carries a fixed unit-norm identity
//! embedding (its category's text embedding); per-frame proposal embeddings
//! are that identity plus Gaussian noise. Objects can be occluded for a window
//! of frames (low object score, stale mask, unreliable embedding), and
//! look-alike distractors can be injected to confuse association.
//!
//! All randomness comes from one `Xoshiro256PlusPlus` stream seeded with
//! `seed_from_u64(seed)`. Uniform draws are `((next_u64 >> 11) + 0.5) / 2^53`
//! and normal draws are the standard normal inverse CDF of a uniform draw, so
//! the bit stream can be reproduced by any implementation of the generator.

pub mod oracle;

use std::path::{Path, PathBuf};

use ndarray::{Array1, Array2};
use rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::classifier::{classification_scores, ClassHead, ClassifierConfig, Vocabulary};
use crate::dataio::{self, FileKind, VideoProposals};
use crate::error::{Error, Result};
use crate::evaluator::{CategoryMeta, GroundTruth, GtInstance, VideoMeta};
use crate::mask::RleMask;
use crate::tracker::{FrameProposals, Tracklet};

pub use oracle::{brute_force_assignment, dense_reference_eval};

/// Object score of a visible object.
pub const VISIBLE_SCORE: f64 = 0.95;
/// Object score inside an occlusion window.
pub const OCCLUDED_SCORE: f64 = 0.05;
/// Object score of distractors and look-alikes.
pub const DISTRACTOR_SCORE: f64 = 0.1;

/// An inclusive range of frames during which one object is occluded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Occlusion {
    pub object: usize,
    pub frames: [usize; 2],
}

/// A distractor shaped like `object` whose embedding has cosine `cosine`
/// with the object's identity. It appears at `from_frame` and stays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lookalike {
    pub object: usize,
    pub from_frame: usize,
    pub cosine: f64,
}

fn one() -> usize {
    1
}

fn unit_speed() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureSpec {
    pub seed: u64,
    #[serde(default = "one")]
    pub videos: usize,
    /// Proposals per frame.
    pub n_queries: usize,
    pub n_objects: usize,
    #[serde(default)]
    pub n_distractors: usize,
    pub frame_count: usize,
    /// `[height, width]`.
    pub size: [u32; 2],
    pub embed_dim: usize,
    #[serde(default)]
    pub noise_sigma: f64,
    /// `[min, max]` rectangle side in pixels.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub box_size: Option<[u32; 2]>,
    /// Largest per-axis speed in pixels per frame.
    #[serde(default = "unit_speed")]
    pub max_speed: f64,
    /// Category index of each object; defaults to `0..n_objects`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub categories: Vec<usize>,
    /// Categories with index below this are base; defaults to half, rounded up.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_base: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub occlusions: Vec<Occlusion>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lookalikes: Vec<Lookalike>,
}

impl FixtureSpec {
    /// Noise-free single-video spec with one object per category.
    pub fn simple(seed: u64, n_objects: usize, n_queries: usize, frame_count: usize) -> Self {
        FixtureSpec {
            seed,
            videos: 1,
            n_queries,
            n_objects,
            n_distractors: 0,
            frame_count,
            size: [48, 64],
            embed_dim: 16,
            noise_sigma: 0.0,
            box_size: None,
            max_speed: 1.0,
            categories: Vec::new(),
            n_base: None,
            occlusions: Vec::new(),
            lookalikes: Vec::new(),
        }
    }

    pub fn object_categories(&self) -> Vec<usize> {
        if self.categories.is_empty() {
            (0..self.n_objects).collect()
        } else {
            self.categories.clone()
        }
    }

    pub fn n_categories(&self) -> usize {
        self.object_categories().iter().max().map_or(0, |&m| m + 1)
    }

    pub fn n_background(&self) -> usize {
        self.n_queries
            .saturating_sub(self.n_objects + self.n_distractors)
    }

    fn box_range(&self) -> [u32; 2] {
        self.box_size.unwrap_or_else(|| {
            let side = self.size[0].min(self.size[1]);
            let lo = (side / 8).max(2);
            [lo, (side / 3).max(lo)]
        })
    }

    pub fn validate(&self) -> Result<()> {
        let spec_err = |m: String| Err(Error::Spec(m));
        let [h, w] = self.size;
        if h == 0 || w == 0 {
            return spec_err(format!("canvas {h}x{w} is empty"));
        }
        if self.videos == 0 || self.frame_count == 0 || self.embed_dim == 0 {
            return spec_err("videos, frame_count and embed_dim must be positive".into());
        }
        if self.n_objects == 0 {
            return spec_err("a fixture needs at least one object".into());
        }
        if self.n_objects + self.n_distractors > self.n_queries {
            return spec_err(format!(
                "{} objects and {} distractors do not fit in {} queries",
                self.n_objects, self.n_distractors, self.n_queries
            ));
        }
        let [lo, hi] = self.box_range();
        if lo == 0 || lo > hi {
            return spec_err(format!("box size range [{lo}, {hi}] is invalid"));
        }
        if hi > h.min(w) {
            return spec_err(format!(
                "rectangles up to {hi} px do not fit a {h}x{w} canvas"
            ));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return spec_err("noise_sigma must be a non-negative number".into());
        }
        if !(self.max_speed >= 0.0 && self.max_speed.is_finite()) {
            return spec_err("max_speed must be a non-negative number".into());
        }
        let cats = self.object_categories();
        if cats.len() != self.n_objects {
            return spec_err(format!(
                "{} category indices for {} objects",
                cats.len(),
                self.n_objects
            ));
        }
        let mut sorted = cats.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != cats.len() {
            return spec_err("objects sharing a video must have distinct categories".into());
        }
        if self.n_categories() > self.embed_dim {
            return spec_err(format!(
                "{} categories need embed_dim >= {0}",
                self.n_categories()
            ));
        }
        if let Some(b) = self.n_base {
            if b > self.n_categories() {
                return spec_err(format!(
                    "n_base {b} exceeds {} categories",
                    self.n_categories()
                ));
            }
        }
        for o in &self.occlusions {
            if o.object >= self.n_objects {
                return spec_err(format!("occlusion refers to object {}", o.object));
            }
            if o.frames[0] > o.frames[1] || o.frames[1] >= self.frame_count {
                return spec_err(format!(
                    "occlusion window {:?} is outside the video",
                    o.frames
                ));
            }
        }
        for k in 0..self.n_objects {
            let mut windows: Vec<[usize; 2]> = self
                .occlusions
                .iter()
                .filter(|o| o.object == k)
                .map(|o| o.frames)
                .collect();
            windows.sort_unstable();
            if windows.windows(2).any(|p| p[1][0] <= p[0][1]) {
                return spec_err(format!("object {k} has overlapping occlusion windows"));
            }
            let hidden: usize = windows.iter().map(|w| w[1] - w[0] + 1).sum();
            if hidden == self.frame_count {
                return spec_err(format!("object {k} is never visible"));
            }
        }
        if self.lookalikes.len() > self.n_background() {
            return spec_err(format!(
                "{} look-alikes need as many free queries, only {} are free",
                self.lookalikes.len(),
                self.n_background()
            ));
        }
        for l in &self.lookalikes {
            if l.object >= self.n_objects || l.from_frame >= self.frame_count {
                return spec_err(format!("look-alike {l:?} is out of range"));
            }
            if !(-1.0..=1.0).contains(&l.cosine) {
                return spec_err(format!("look-alike cosine {} outside [-1, 1]", l.cosine));
            }
        }
        Ok(())
    }
}

pub fn load_fixture_spec(path: impl AsRef<Path>) -> Result<FixtureSpec> {
    let spec: FixtureSpec = dataio::read_json(path.as_ref(), FileKind::FixtureSpec)?;
    spec.validate()?;
    Ok(spec)
}

pub fn save_fixture_spec(path: impl AsRef<Path>, spec: &FixtureSpec) -> Result<()> {
    dataio::write_json(path.as_ref(), spec)
}

/// What produced a proposal; kept alongside a fixture for tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProposalSource {
    Object(usize),
    Occluded(usize),
    Distractor(usize),
    Lookalike(usize),
    Background,
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub ground_truth: GroundTruth,
    pub videos: Vec<VideoProposals>,
    pub vocabulary: Vocabulary,
    pub class_head: ClassHead,
    /// `sources[video][frame][proposal]`.
    pub sources: Vec<Vec<Vec<ProposalSource>>>,
}

/// Locations of a fixture written to disk.
#[derive(Debug, Clone)]
pub struct FixturePaths {
    pub ground_truth: PathBuf,
    pub vocabulary: PathBuf,
    pub class_head: PathBuf,
    pub proposals: Vec<PathBuf>,
}

impl Fixture {
    /// Writes `gt.json`, `vocab.json`, `head.json` and `proposals/<video>.json`.
    pub fn write_to(&self, dir: impl AsRef<Path>) -> Result<FixturePaths> {
        let dir = dir.as_ref();
        let paths = FixturePaths {
            ground_truth: dir.join("gt.json"),
            vocabulary: dir.join("vocab.json"),
            class_head: dir.join("head.json"),
            proposals: self
                .videos
                .iter()
                .map(|v| dir.join("proposals").join(format!("{}.json", v.video_id)))
                .collect(),
        };
        dataio::save_ground_truth(&paths.ground_truth, &self.ground_truth)?;
        dataio::save_vocabulary(&paths.vocabulary, &self.vocabulary)?;
        dataio::save_class_head(&paths.class_head, &self.class_head)?;
        for (video, path) in self.videos.iter().zip(&paths.proposals) {
            dataio::save_proposals(path, video)?;
        }
        Ok(paths)
    }

    /// Track id holding `object` at each frame where it is visible.
    pub fn object_track_ids(
        &self,
        video: usize,
        object: usize,
        tracklets: &[Tracklet],
    ) -> Vec<usize> {
        self.visible_proposals(video, object)
            .into_iter()
            .filter_map(|(t, j)| {
                tracklets
                    .iter()
                    .find(|tr| tr.frames.get(t).is_some_and(|f| f.proposal_index == j))
                    .map(|tr| tr.track_id)
            })
            .collect()
    }

    /// Frames where `object` is visible in `video`, with the proposal index it occupies.
    pub fn visible_proposals(&self, video: usize, object: usize) -> Vec<(usize, usize)> {
        self.sources[video]
            .iter()
            .enumerate()
            .filter_map(|(t, frame)| {
                frame
                    .iter()
                    .position(|s| *s == ProposalSource::Object(object))
                    .map(|j| (t, j))
            })
            .collect()
    }
}

struct FixtureRng {
    inner: Xoshiro256PlusPlus,
    normal: Normal,
}

impl FixtureRng {
    fn new(seed: u64) -> Self {
        FixtureRng {
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
            normal: Normal::new(0.0, 1.0).expect("standard normal"),
        }
    }

    /// Uniform on the open interval (0, 1).
    fn uniform(&mut self) -> f64 {
        ((self.inner.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
    }

    fn gaussian(&mut self) -> f64 {
        let u = self.uniform();
        self.normal.inverse_cdf(u)
    }

    fn between(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `lo..=hi`.
    fn int_between(&mut self, lo: u32, hi: u32) -> u32 {
        let span = (hi - lo + 1) as f64;
        lo + ((self.uniform() * span) as u32).min(hi - lo)
    }

    fn gaussian_vec(&mut self, d: usize) -> Array1<f64> {
        (0..d).map(|_| self.gaussian()).collect()
    }

    fn unit_vector(&mut self, d: usize) -> Array1<f64> {
        let v = self.gaussian_vec(d);
        let n = v.dot(&v).sqrt();
        v / n
    }

    fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = ((self.uniform() * (i + 1) as f64) as usize).min(i);
            items.swap(i, j);
        }
    }
}

/// `count` unit vectors; the first `min(count, d)` are mutually orthogonal.
fn basis(rng: &mut FixtureRng, count: usize, d: usize) -> Vec<Array1<f64>> {
    let mut out: Vec<Array1<f64>> = Vec::with_capacity(count);
    for k in 0..count {
        let mut v = rng.gaussian_vec(d);
        if k < d {
            // two Gram-Schmidt passes keep the rows orthogonal to rounding
            for _ in 0..2 {
                for b in &out[..k] {
                    let proj = v.dot(b);
                    v.scaled_add(-proj, b);
                }
            }
        }
        let n = v.dot(&v).sqrt();
        out.push(v / n);
    }
    out
}

#[derive(Clone, Copy)]
struct Rect {
    top: u32,
    left: u32,
    height: u32,
    width: u32,
}

impl Rect {
    fn mask(&self, h: u32, w: u32) -> RleMask {
        RleMask::from_rect(
            h,
            w,
            self.top..self.top + self.height,
            self.left..self.left + self.width,
        )
        .expect("canvas validated")
    }

    /// The central half of the rectangle, at least one pixel.
    fn shrunk(&self) -> Rect {
        let height = (self.height / 2).max(1);
        let width = (self.width / 2).max(1);
        Rect {
            top: self.top + (self.height - height) / 2,
            left: self.left + (self.width - width) / 2,
            height,
            width,
        }
    }
}

struct Track {
    height: u32,
    width: u32,
    y0: f64,
    x0: f64,
    vy: f64,
    vx: f64,
}

impl Track {
    fn at(&self, t: usize, canvas: [u32; 2]) -> Rect {
        let place = |p0: f64, v: f64, extent: u32, side: u32| {
            let p = (p0 + v * t as f64).round();
            p.clamp(0.0, (extent - side) as f64) as u32
        };
        Rect {
            top: place(self.y0, self.vy, canvas[0], self.height),
            left: place(self.x0, self.vx, canvas[1], self.width),
            height: self.height,
            width: self.width,
        }
    }
}

fn random_rect(rng: &mut FixtureRng, canvas: [u32; 2], height: u32, width: u32) -> Rect {
    Rect {
        top: rng.int_between(0, canvas[0] - height),
        left: rng.int_between(0, canvas[1] - width),
        height,
        width,
    }
}

/// Builds the ground truth, proposal files, vocabulary and identity class head.
pub fn generate_fixture(spec: &FixtureSpec) -> Result<Fixture> {
    spec.validate()?;
    let mut rng = FixtureRng::new(spec.seed);
    let d = spec.embed_dim;
    let [h, w] = spec.size;
    let [box_lo, box_hi] = spec.box_range();
    let cats = spec.object_categories();
    let n_cat = spec.n_categories();
    let n_bg = spec.n_background();
    let n_base = spec.n_base.unwrap_or(n_cat.div_ceil(2));

    let mut dirs = basis(
        &mut rng,
        n_cat + spec.lookalikes.len() + spec.n_distractors + n_bg,
        d,
    )
    .into_iter();
    let category_emb: Vec<Array1<f64>> = dirs.by_ref().take(n_cat).collect();
    let lookalike_dir: Vec<Array1<f64>> = dirs.by_ref().take(spec.lookalikes.len()).collect();
    let distractor_emb: Vec<Array1<f64>> = dirs.by_ref().take(spec.n_distractors).collect();
    let background_emb: Vec<Array1<f64>> = dirs.collect();

    let lookalike_emb: Vec<Array1<f64>> = spec
        .lookalikes
        .iter()
        .zip(&lookalike_dir)
        .map(|(l, u)| {
            let c = l.cosine;
            &category_emb[cats[l.object]] * c + u * (1.0 - c * c).sqrt()
        })
        .collect();

    let mut emb_rows = Array2::zeros((n_cat, d));
    for (k, e) in category_emb.iter().enumerate() {
        emb_rows.row_mut(k).assign(e);
    }
    let vocabulary = Vocabulary::new(
        (0..n_cat as u64).collect(),
        (0..n_cat).map(|k| format!("category_{k:02}")).collect(),
        emb_rows,
        (0..n_cat).map(|k| k < n_base).collect(),
        "this is a photo of [X]",
    )?;
    let class_head = ClassHead::identity(d);
    let score_cfg = ClassifierConfig::default();

    let occluded = |object: usize, t: usize| {
        spec.occlusions
            .iter()
            .find(|o| o.object == object && (o.frames[0]..=o.frames[1]).contains(&t))
    };

    let mut ground_truth = GroundTruth {
        videos: Vec::new(),
        categories: (0..n_cat)
            .map(|k| CategoryMeta {
                id: k as u64,
                name: vocabulary.names()[k].clone(),
            })
            .collect(),
        instances: Vec::new(),
    };
    let mut videos = Vec::with_capacity(spec.videos);
    let mut sources = Vec::with_capacity(spec.videos);

    for v in 0..spec.videos {
        let video_id = format!("video_{v:02}");
        let tracks: Vec<Track> = (0..spec.n_objects)
            .map(|_| {
                let height = rng.int_between(box_lo, box_hi);
                let width = rng.int_between(box_lo, box_hi);
                Track {
                    height,
                    width,
                    y0: rng.int_between(0, h - height) as f64,
                    x0: rng.int_between(0, w - width) as f64,
                    vy: rng.between(-spec.max_speed, spec.max_speed),
                    vx: rng.between(-spec.max_speed, spec.max_speed),
                }
            })
            .collect();
        let distractor_rects: Vec<Rect> = (0..spec.n_distractors)
            .map(|_| random_rect(&mut rng, spec.size, box_lo, box_lo))
            .collect();
        let lookalike_rects: Vec<Rect> = spec
            .lookalikes
            .iter()
            .map(|l| {
                let t = &tracks[l.object];
                random_rect(&mut rng, spec.size, t.height, t.width)
            })
            .collect();

        let mut gt_masks: Vec<Vec<Option<RleMask>>> = vec![Vec::new(); spec.n_objects];
        let mut frames = Vec::with_capacity(spec.frame_count);
        let mut video_sources = Vec::with_capacity(spec.frame_count);
        for t in 0..spec.frame_count {
            let mut entries: Vec<(ProposalSource, Array1<f64>, f64, RleMask)> =
                Vec::with_capacity(spec.n_queries);
            for (k, track) in tracks.iter().enumerate() {
                let identity = &category_emb[cats[k]];
                match occluded(k, t) {
                    Some(window) => {
                        gt_masks[k].push(None);
                        let last = window.frames[0].saturating_sub(1);
                        let stale = track.at(last, spec.size).shrunk();
                        entries.push((
                            ProposalSource::Occluded(k),
                            rng.unit_vector(d),
                            OCCLUDED_SCORE,
                            stale.mask(h, w),
                        ));
                    }
                    None => {
                        let mask = track.at(t, spec.size).mask(h, w);
                        gt_masks[k].push(Some(mask.clone()));
                        let emb = identity + &(rng.gaussian_vec(d) * spec.noise_sigma);
                        entries.push((ProposalSource::Object(k), emb, VISIBLE_SCORE, mask));
                    }
                }
            }
            for (k, rect) in distractor_rects.iter().enumerate() {
                let emb = &distractor_emb[k] + &(rng.gaussian_vec(d) * spec.noise_sigma);
                entries.push((
                    ProposalSource::Distractor(k),
                    emb,
                    DISTRACTOR_SCORE,
                    rect.mask(h, w),
                ));
            }
            for k in 0..n_bg {
                let active = spec.lookalikes.get(k).filter(|l| t >= l.from_frame);
                if active.is_some() {
                    let emb = &lookalike_emb[k] + &(rng.gaussian_vec(d) * spec.noise_sigma);
                    let mask = lookalike_rects[k].mask(h, w);
                    entries.push((ProposalSource::Lookalike(k), emb, DISTRACTOR_SCORE, mask));
                } else {
                    let emb = &background_emb[k] + &(rng.gaussian_vec(d) * spec.noise_sigma);
                    let mask = RleMask::empty(h, w)?;
                    entries.push((ProposalSource::Background, emb, 0.0, mask));
                }
            }
            rng.shuffle(&mut entries);

            let n = entries.len();
            let mut embeddings = Array2::zeros((n, d));
            let mut scores = Vec::with_capacity(n);
            let mut masks = Vec::with_capacity(n);
            let mut frame_sources = Vec::with_capacity(n);
            for (j, (source, emb, score, mask)) in entries.into_iter().enumerate() {
                embeddings.row_mut(j).assign(&emb);
                scores.push(score);
                masks.push(mask);
                frame_sources.push(source);
            }
            let class_scores = classification_scores(&embeddings, &vocabulary, &score_cfg)?;
            frames.push(
                FrameProposals::new(t, embeddings, scores, masks)?
                    .with_class_scores(class_scores)?,
            );
            video_sources.push(frame_sources);
        }

        for (k, masks) in gt_masks.into_iter().enumerate() {
            ground_truth.instances.push(GtInstance {
                video_id: video_id.clone(),
                category_id: cats[k] as u64,
                masks,
            });
        }
        ground_truth.videos.push(VideoMeta {
            id: video_id.clone(),
            height: h,
            width: w,
            frame_count: spec.frame_count,
        });
        videos.push(VideoProposals {
            video_id,
            height: h,
            width: w,
            n_queries: spec.n_queries,
            embed_dim: d,
            frames,
        });
        sources.push(video_sources);
    }

    dataio::validate_ground_truth(&ground_truth)?;
    Ok(Fixture {
        ground_truth,
        videos,
        vocabulary,
        class_head,
        sources,
    })
}
