//! The `memtrack/1` on-disk formats.
//!
//! Every file is a JSON object whose `"schema"` key holds [`SCHEMA`]. Numeric
//! arrays are written out in full; floats use the shortest representation
//! that parses back to the same bits, so `save ∘ load ∘ save` is
//! byte-identical. Unknown top-level keys are ignored with a warning. Every
//! loader validates the value it returns.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use log::warn;
use ndarray::{Array1, Array2};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::classifier::{Activation, ClassHead, ClassifierConfig, Confidence, Layer, Vocabulary};
use crate::error::{Error, Result};
use crate::evaluator::{
    CategoryMeta, EvalConfig, EvalReport, GroundTruth, GtInstance, Prediction, VideoMeta,
};
use crate::mask::RleMask;
use crate::tracker::{FrameProposals, TrackerConfig, Tracklet};

pub const SCHEMA: &str = "memtrack/1";

/// Which `memtrack/1` document a file holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FileKind {
    Proposals,
    GroundTruth,
    Vocabulary,
    ClassHead,
    Predictions,
    Report,
    FixtureSpec,
    RunConfig,
}

impl FileKind {
    fn keys(self) -> &'static [&'static str] {
        match self {
            FileKind::Proposals => &["video_id", "size", "n_queries", "embed_dim", "frames"],
            FileKind::GroundTruth => &["videos", "categories", "annotations"],
            FileKind::Vocabulary => &["prompt_template", "categories"],
            FileKind::ClassHead => &["layers", "activation"],
            FileKind::Predictions => &["predictions"],
            FileKind::Report => &["mAP", "mAP_b", "mAP_n", "iou_thresholds", "per_category"],
            FileKind::FixtureSpec => &[
                "seed",
                "videos",
                "n_queries",
                "n_objects",
                "n_distractors",
                "frame_count",
                "size",
                "embed_dim",
                "noise_sigma",
                "box_size",
                "max_speed",
                "categories",
                "n_base",
                "occlusions",
                "lookalikes",
            ],
            FileKind::RunConfig => &["tracker", "classifier", "eval", "export"],
        }
    }

    /// Guesses the kind from the top-level keys.
    pub fn detect(value: &Value) -> Option<FileKind> {
        let obj = value.as_object()?;
        let has = |k: &str| obj.contains_key(k);
        Some(if has("frames") {
            FileKind::Proposals
        } else if has("annotations") {
            FileKind::GroundTruth
        } else if has("prompt_template") {
            FileKind::Vocabulary
        } else if has("layers") {
            FileKind::ClassHead
        } else if has("predictions") {
            FileKind::Predictions
        } else if has("mAP") {
            FileKind::Report
        } else if has("seed") {
            FileKind::FixtureSpec
        } else if has("tracker") || has("classifier") || has("eval") || has("export") {
            FileKind::RunConfig
        } else {
            return None;
        })
    }
}

pub(crate) fn read_value(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| {
        Error::Format(format!(
            "{}: line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

/// Checks the schema tag, drops unknown top-level keys and deserializes.
pub(crate) fn from_value<T: DeserializeOwned>(
    mut value: Value,
    kind: FileKind,
    origin: &str,
) -> Result<T> {
    let obj = value
        .as_object_mut()
        .ok_or_else(|| Error::Format(format!("{origin}: top level is not a JSON object")))?;
    match obj.remove("schema") {
        Some(Value::String(s)) if s == SCHEMA => {}
        Some(other) => {
            return Err(Error::Format(format!(
                "{origin}: unsupported schema {other}, expected {SCHEMA:?}"
            )))
        }
        None => return Err(Error::Format(format!("{origin}: missing \"schema\" key"))),
    }
    let unknown: Vec<String> = obj
        .keys()
        .filter(|k| !kind.keys().contains(&k.as_str()))
        .cloned()
        .collect();
    for key in unknown {
        warn!("{origin}: ignoring unknown top-level key {key:?}");
        obj.remove(&key);
    }
    serde_path_to_error::deserialize(value)
        .map_err(|e| Error::Format(format!("{origin}: at `{}`: {}", e.path(), e.inner())))
}

pub(crate) fn read_json<T: DeserializeOwned>(path: &Path, kind: FileKind) -> Result<T> {
    let value = read_value(path)?;
    from_value(value, kind, &path.display().to_string())
}

#[derive(Serialize)]
struct Tagged<'a, T: Serialize> {
    schema: &'static str,
    #[serde(flatten)]
    body: &'a T,
}

/// Compact JSON with the schema tag first, newline-terminated.
pub fn to_json_bytes<T: Serialize>(body: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec(&Tagged {
        schema: SCHEMA,
        body,
    })
    .map_err(|e| Error::Format(format!("serialization failed: {e}")))?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub(crate) fn write_json<T: Serialize>(path: &Path, body: &T) -> Result<()> {
    let bytes = to_json_bytes(body)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn matrix_from_rows(rows: &[Vec<f64>], cols: usize, what: &str) -> Result<Array2<f64>> {
    if let Some(k) = rows.iter().position(|r| r.len() != cols) {
        return Err(Error::Validation(format!(
            "{what}: row {k} has length {}, expected {cols}",
            rows[k].len()
        )));
    }
    let data: Vec<f64> = rows.iter().flatten().copied().collect();
    Array2::from_shape_vec((rows.len(), cols), data)
        .map_err(|e| Error::Validation(format!("{what}: {e}")))
}

fn matrix_to_rows(m: &Array2<f64>) -> Vec<Vec<f64>> {
    m.rows().into_iter().map(|r| r.to_vec()).collect()
}

// ---------------------------------------------------------------------------
// proposals

/// All proposals of one video.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoProposals {
    pub video_id: String,
    pub height: u32,
    pub width: u32,
    pub n_queries: usize,
    pub embed_dim: usize,
    pub frames: Vec<FrameProposals>,
}

#[derive(Serialize, Deserialize)]
struct FrameJson {
    frame_index: usize,
    embeddings: Vec<Vec<f64>>,
    object_scores: Vec<f64>,
    masks: Vec<RleMask>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    class_scores: Option<Vec<Vec<f64>>>,
}

#[derive(Serialize, Deserialize)]
struct ProposalsJson {
    video_id: String,
    size: [u32; 2],
    n_queries: usize,
    embed_dim: usize,
    frames: Vec<FrameJson>,
}

impl VideoProposals {
    fn from_json(raw: ProposalsJson) -> Result<Self> {
        let [height, width] = raw.size;
        let (n, d) = (raw.n_queries, raw.embed_dim);
        if raw.frames.is_empty() {
            return Err(Error::Validation(format!(
                "video {:?} has no frames",
                raw.video_id
            )));
        }
        let mut frames = Vec::with_capacity(raw.frames.len());
        for (t, f) in raw.frames.into_iter().enumerate() {
            let bad = |msg: String| Error::Validation(format!("frame {t}: {msg}"));
            if f.frame_index != t {
                return Err(bad(format!(
                    "frame_index is {}, frames must be numbered 0..T-1",
                    f.frame_index
                )));
            }
            if f.embeddings.len() != n || f.object_scores.len() != n || f.masks.len() != n {
                return Err(bad(format!(
                    "{} embeddings, {} object scores, {} masks; n_queries is {n}",
                    f.embeddings.len(),
                    f.object_scores.len(),
                    f.masks.len()
                )));
            }
            if let Some(m) = f
                .masks
                .iter()
                .find(|m| m.height() != height || m.width() != width)
            {
                return Err(bad(format!(
                    "mask is {}x{}, video is {height}x{width}",
                    m.height(),
                    m.width()
                )));
            }
            let embeddings = matrix_from_rows(&f.embeddings, d, &format!("frame {t} embeddings"))?;
            let mut frame = FrameProposals::new(t, embeddings, f.object_scores, f.masks)
                .map_err(|e| bad(e.to_string()))?;
            if let Some(cs) = f.class_scores {
                let width = cs.first().map_or(0, Vec::len);
                let cs = matrix_from_rows(&cs, width, &format!("frame {t} class_scores"))?;
                frame = frame
                    .with_class_scores(cs)
                    .map_err(|e| bad(e.to_string()))?;
            }
            frames.push(frame);
        }
        Ok(VideoProposals {
            video_id: raw.video_id,
            height,
            width,
            n_queries: n,
            embed_dim: d,
            frames,
        })
    }

    fn to_json(&self) -> ProposalsJson {
        ProposalsJson {
            video_id: self.video_id.clone(),
            size: [self.height, self.width],
            n_queries: self.n_queries,
            embed_dim: self.embed_dim,
            frames: self
                .frames
                .iter()
                .map(|f| FrameJson {
                    frame_index: f.frame_index(),
                    embeddings: matrix_to_rows(f.embeddings()),
                    object_scores: f.object_scores().to_vec(),
                    masks: f.masks().to_vec(),
                    class_scores: f.class_scores().map(matrix_to_rows),
                })
                .collect(),
        }
    }
}

pub fn load_proposals(path: impl AsRef<Path>) -> Result<VideoProposals> {
    let raw: ProposalsJson = read_json(path.as_ref(), FileKind::Proposals)?;
    VideoProposals::from_json(raw)
}

pub fn save_proposals(path: impl AsRef<Path>, video: &VideoProposals) -> Result<()> {
    write_json(path.as_ref(), &video.to_json())
}

// ---------------------------------------------------------------------------
// ground truth

#[derive(Serialize, Deserialize)]
struct GroundTruthJson {
    videos: Vec<VideoMeta>,
    categories: Vec<CategoryMeta>,
    annotations: Vec<GtInstance>,
}

/// Checks that every annotation refers to a declared video and category and
/// has a non-empty mask somewhere.
pub fn validate_ground_truth(gt: &GroundTruth) -> Result<()> {
    let mut video_ids = HashSet::new();
    for v in &gt.videos {
        if !video_ids.insert(v.id.as_str()) {
            return Err(Error::Validation(format!("duplicate video id {:?}", v.id)));
        }
        if v.height == 0 || v.width == 0 || v.frame_count == 0 {
            return Err(Error::Validation(format!(
                "video {:?} has an empty extent",
                v.id
            )));
        }
    }
    let mut cat_ids = HashSet::new();
    for c in &gt.categories {
        if !cat_ids.insert(c.id) {
            return Err(Error::Validation(format!("duplicate category id {}", c.id)));
        }
    }
    for (k, a) in gt.instances.iter().enumerate() {
        let video = gt
            .videos
            .iter()
            .find(|v| v.id == a.video_id)
            .ok_or_else(|| {
                Error::Validation(format!("annotation {k}: undeclared video {:?}", a.video_id))
            })?;
        if !cat_ids.contains(&a.category_id) {
            return Err(Error::Validation(format!(
                "annotation {k}: undeclared category {}",
                a.category_id
            )));
        }
        if a.masks.len() != video.frame_count {
            return Err(Error::Validation(format!(
                "annotation {k}: {} masks for {} frames",
                a.masks.len(),
                video.frame_count
            )));
        }
        for (t, m) in a.masks.iter().enumerate() {
            if let Some(m) = m {
                if m.height() != video.height || m.width() != video.width {
                    return Err(Error::Validation(format!(
                        "annotation {k}: frame {t} mask is {}x{}, video is {}x{}",
                        m.height(),
                        m.width(),
                        video.height,
                        video.width
                    )));
                }
            }
        }
        if a.masks.iter().flatten().all(RleMask::is_empty) {
            return Err(Error::Validation(format!(
                "annotation {k}: every frame is empty"
            )));
        }
    }
    Ok(())
}

pub fn load_ground_truth(path: impl AsRef<Path>) -> Result<GroundTruth> {
    let raw: GroundTruthJson = read_json(path.as_ref(), FileKind::GroundTruth)?;
    let gt = GroundTruth {
        videos: raw.videos,
        categories: raw.categories,
        instances: raw.annotations,
    };
    validate_ground_truth(&gt)?;
    Ok(gt)
}

pub fn save_ground_truth(path: impl AsRef<Path>, gt: &GroundTruth) -> Result<()> {
    write_json(
        path.as_ref(),
        &GroundTruthJson {
            videos: gt.videos.clone(),
            categories: gt.categories.clone(),
            annotations: gt.instances.clone(),
        },
    )
}

// ---------------------------------------------------------------------------
// vocabulary

#[derive(Serialize, Deserialize)]
struct CategoryJson {
    id: u64,
    name: String,
    base: bool,
    embedding: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct VocabularyJson {
    prompt_template: String,
    categories: Vec<CategoryJson>,
}

pub fn load_vocabulary(path: impl AsRef<Path>) -> Result<Vocabulary> {
    let raw: VocabularyJson = read_json(path.as_ref(), FileKind::Vocabulary)?;
    let dim = raw.categories.first().map_or(0, |c| c.embedding.len());
    let rows: Vec<Vec<f64>> = raw.categories.iter().map(|c| c.embedding.clone()).collect();
    let embeddings = matrix_from_rows(&rows, dim, "vocabulary embeddings")?;
    Vocabulary::new(
        raw.categories.iter().map(|c| c.id).collect(),
        raw.categories.iter().map(|c| c.name.clone()).collect(),
        embeddings,
        raw.categories.iter().map(|c| c.base).collect(),
        raw.prompt_template,
    )
}

pub fn save_vocabulary(path: impl AsRef<Path>, vocab: &Vocabulary) -> Result<()> {
    let categories = (0..vocab.len())
        .map(|i| CategoryJson {
            id: vocab.ids()[i],
            name: vocab.names()[i].clone(),
            base: vocab.is_base()[i],
            embedding: vocab.embeddings().row(i).to_vec(),
        })
        .collect();
    write_json(
        path.as_ref(),
        &VocabularyJson {
            prompt_template: vocab.prompt_template().to_string(),
            categories,
        },
    )
}

// ---------------------------------------------------------------------------
// class head

#[derive(Serialize, Deserialize)]
struct LayerJson {
    weight: Vec<Vec<f64>>,
    bias: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ClassHeadJson {
    layers: Vec<LayerJson>,
    activation: Activation,
}

pub fn load_class_head(path: impl AsRef<Path>) -> Result<ClassHead> {
    let raw: ClassHeadJson = read_json(path.as_ref(), FileKind::ClassHead)?;
    let layers = raw
        .layers
        .into_iter()
        .enumerate()
        .map(|(k, l)| {
            let cols = l.weight.first().map_or(0, Vec::len);
            let weight = matrix_from_rows(&l.weight, cols, &format!("layer {k} weight"))
                .map_err(|e| Error::Weights(e.to_string()))?;
            Ok(Layer {
                weight,
                bias: Array1::from(l.bias),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ClassHead::new(layers, raw.activation)
}

pub fn save_class_head(path: impl AsRef<Path>, head: &ClassHead) -> Result<()> {
    write_json(
        path.as_ref(),
        &ClassHeadJson {
            layers: head
                .layers()
                .iter()
                .map(|l| LayerJson {
                    weight: matrix_to_rows(&l.weight),
                    bias: l.bias.to_vec(),
                })
                .collect(),
            activation: head.activation(),
        },
    )
}

// ---------------------------------------------------------------------------
// predictions

/// Which categories of a classified tracklet are exported.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExportConfig {
    /// Categories per tracklet, most confident first.
    pub top_k: usize,
    /// Only scores strictly above this are exported.
    pub threshold: f64,
}

impl Default for ExportConfig {
    fn default() -> Self {
        ExportConfig {
            top_k: 10,
            threshold: 0.0,
        }
    }
}

/// Orders predictions by video, then decreasing score, then track and category.
pub fn sort_predictions(preds: &mut [Prediction]) {
    preds.sort_by(|a, b| {
        a.video_id
            .cmp(&b.video_id)
            .then(b.score.total_cmp(&a.score))
            .then(a.track_id.cmp(&b.track_id))
            .then(a.category_id.cmp(&b.category_id))
    });
}

/// Turns classified tracklets into prediction records. Tracklets without a
/// single foreground pixel are skipped.
pub fn tracklets_to_predictions(
    video_id: &str,
    tracklets: &[Tracklet],
    vocab: &Vocabulary,
    export: &ExportConfig,
    confidence: Confidence,
) -> Result<Vec<Prediction>> {
    let mut out = Vec::new();
    for t in tracklets {
        if t.class_scores.len() != vocab.len() {
            return Err(Error::InvalidInput(format!(
                "tracklet {} has {} class scores for {} categories",
                t.track_id,
                t.class_scores.len(),
                vocab.len()
            )));
        }
        if !t.has_foreground() {
            continue;
        }
        let masks: Vec<Option<RleMask>> = t.frames.iter().map(|f| f.mask.clone()).collect();
        let mut ranked: Vec<(usize, f64)> = t
            .class_scores
            .iter()
            .map(|&s| match confidence {
                Confidence::ClassScore => s,
                Confidence::ClassTimesObject => s * t.mean_object_score,
            })
            .enumerate()
            .filter(|&(_, s)| s > export.threshold)
            .collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        ranked.truncate(export.top_k);
        for (c, score) in ranked {
            out.push(Prediction {
                video_id: video_id.to_string(),
                track_id: Some(t.track_id),
                category_id: vocab.ids()[c],
                score,
                masks: masks.clone(),
            });
        }
    }
    sort_predictions(&mut out);
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct PredictionsJson {
    predictions: Vec<Prediction>,
}

pub fn write_predictions(path: impl AsRef<Path>, preds: &[Prediction]) -> Result<()> {
    write_json(
        path.as_ref(),
        &PredictionsJson {
            predictions: preds.to_vec(),
        },
    )
}

pub fn load_predictions(path: impl AsRef<Path>) -> Result<Vec<Prediction>> {
    let raw: PredictionsJson = read_json(path.as_ref(), FileKind::Predictions)?;
    for (k, p) in raw.predictions.iter().enumerate() {
        if !(0.0..=1.0).contains(&p.score) {
            return Err(Error::Validation(format!(
                "prediction {k}: score {} outside [0, 1]",
                p.score
            )));
        }
    }
    Ok(raw.predictions)
}

// ---------------------------------------------------------------------------
// reports and run configuration

pub fn save_report(path: impl AsRef<Path>, report: &EvalReport) -> Result<()> {
    write_json(path.as_ref(), report)
}

pub fn load_report(path: impl AsRef<Path>) -> Result<EvalReport> {
    read_json(path.as_ref(), FileKind::Report)
}

/// Settings file shared by the command-line subcommands. Every section is optional.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct RunSettings {
    pub tracker: TrackerConfig,
    pub classifier: ClassifierConfig,
    pub eval: EvalConfig,
    pub export: ExportConfig,
}

pub fn load_run_settings(path: impl AsRef<Path>) -> Result<RunSettings> {
    let settings: RunSettings = read_json(path.as_ref(), FileKind::RunConfig)?;
    settings.tracker.validate()?;
    settings.classifier.validate()?;
    settings.eval.validate()?;
    Ok(settings)
}

pub fn save_run_settings(path: impl AsRef<Path>, settings: &RunSettings) -> Result<()> {
    write_json(path.as_ref(), settings)
}

/// Loads and validates any `memtrack/1` file; returns its kind.
pub fn validate_file(path: impl AsRef<Path>) -> Result<FileKind> {
    let path = path.as_ref();
    let value = read_value(path)?;
    let kind = FileKind::detect(&value).ok_or_else(|| {
        Error::Format(format!(
            "{}: not a recognised memtrack/1 document",
            path.display()
        ))
    })?;
    match kind {
        FileKind::Proposals => drop(load_proposals(path)?),
        FileKind::GroundTruth => drop(load_ground_truth(path)?),
        FileKind::Vocabulary => drop(load_vocabulary(path)?),
        FileKind::ClassHead => drop(load_class_head(path)?),
        FileKind::Predictions => drop(load_predictions(path)?),
        FileKind::Report => drop(load_report(path)?),
        FileKind::FixtureSpec => drop(crate::synth::load_fixture_spec(path)?),
        FileKind::RunConfig => drop(load_run_settings(path)?),
    }
    Ok(kind)
}
