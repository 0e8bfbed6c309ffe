//! Open-vocabulary classification of tracklets.
//!
//! Memory queries go through a small MLP class head into the text-embedding
//! space, and each class embedding is scored against every category's text
//! embedding with a temperature-scaled cosine followed by a sigmoid.

use std::collections::HashSet;

use ndarray::{Array1, Array2, ArrayView1, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tracker::{FrameProposals, MemoryBank, Tracklet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Relu,
    None,
}

/// One affine layer: `weight` is `out × in`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
}

/// Affine layers with an activation between consecutive layers (never after the last).
#[derive(Debug, Clone, PartialEq)]
pub struct ClassHead {
    layers: Vec<Layer>,
    activation: Activation,
}

impl ClassHead {
    pub fn new(layers: Vec<Layer>, activation: Activation) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Weights("class head has no layers".into()));
        }
        for (k, layer) in layers.iter().enumerate() {
            if layer.bias.len() != layer.weight.nrows() {
                return Err(Error::Weights(format!(
                    "layer {k}: bias length {} for {} outputs",
                    layer.bias.len(),
                    layer.weight.nrows()
                )));
            }
            if layer.weight.ncols() == 0 || layer.weight.nrows() == 0 {
                return Err(Error::Weights(format!(
                    "layer {k} has an empty weight matrix"
                )));
            }
            if layer
                .weight
                .iter()
                .chain(layer.bias.iter())
                .any(|x| !x.is_finite())
            {
                return Err(Error::Weights(format!(
                    "layer {k} has non-finite parameters"
                )));
            }
        }
        for (k, pair) in layers.windows(2).enumerate() {
            if pair[1].weight.ncols() != pair[0].weight.nrows() {
                return Err(Error::Weights(format!(
                    "layer {} expects {} inputs but layer {k} produces {}",
                    k + 1,
                    pair[1].weight.ncols(),
                    pair[0].weight.nrows()
                )));
            }
        }
        Ok(ClassHead { layers, activation })
    }

    /// Single-layer identity map on `dim` features.
    pub fn identity(dim: usize) -> Self {
        ClassHead {
            layers: vec![Layer {
                weight: Array2::eye(dim),
                bias: Array1::zeros(dim),
            }],
            activation: Activation::None,
        }
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].weight.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].weight.nrows()
    }
}

/// Runs the class head on each row of `queries`.
pub fn class_head_forward(queries: &Array2<f64>, head: &ClassHead) -> Result<Array2<f64>> {
    if queries.ncols() != head.input_dim() {
        return Err(Error::Weights(format!(
            "class head expects {} inputs, queries have dimension {}",
            head.input_dim(),
            queries.ncols()
        )));
    }
    let last = head.layers.len() - 1;
    let mut x = queries.clone();
    for (k, layer) in head.layers.iter().enumerate() {
        x = x.dot(&layer.weight.t()) + &layer.bias;
        if k < last && head.activation == Activation::Relu {
            x.mapv_inplace(|v| v.max(0.0));
        }
    }
    Ok(x)
}

/// Category names with their precomputed text embeddings and base/novel split.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    ids: Vec<u64>,
    names: Vec<String>,
    embeddings: Array2<f64>,
    is_base: Vec<bool>,
    prompt_template: String,
}

impl Vocabulary {
    pub fn new(
        ids: Vec<u64>,
        names: Vec<String>,
        embeddings: Array2<f64>,
        is_base: Vec<bool>,
        prompt_template: impl Into<String>,
    ) -> Result<Self> {
        let c = names.len();
        if c == 0 {
            return Err(Error::Validation("vocabulary has no categories".into()));
        }
        if ids.len() != c || embeddings.nrows() != c || is_base.len() != c {
            return Err(Error::Validation(format!(
                "vocabulary has {c} names, {} ids, {} embeddings, {} base flags",
                ids.len(),
                embeddings.nrows(),
                is_base.len()
            )));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = names.iter().find(|n| !seen.insert(n.as_str())) {
            return Err(Error::Validation(format!(
                "duplicate category name {dup:?}"
            )));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = ids.iter().find(|&&id| !seen.insert(id)) {
            return Err(Error::Validation(format!("duplicate category id {dup}")));
        }
        for (k, row) in embeddings.rows().into_iter().enumerate() {
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::Validation(format!(
                    "category {:?} has a non-finite embedding",
                    names[k]
                )));
            }
            if row.iter().all(|&x| x == 0.0) {
                return Err(Error::Validation(format!(
                    "category {:?} has a zero embedding",
                    names[k]
                )));
            }
        }
        Ok(Vocabulary {
            ids,
            names,
            embeddings,
            is_base,
            prompt_template: prompt_template.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn embeddings(&self) -> &Array2<f64> {
        &self.embeddings
    }

    pub fn is_base(&self) -> &[bool] {
        &self.is_base
    }

    pub fn prompt_template(&self) -> &str {
        &self.prompt_template
    }

    pub fn embed_dim(&self) -> usize {
        self.embeddings.ncols()
    }

    pub fn index_of(&self, id: u64) -> Option<usize> {
        self.ids.iter().position(|&x| x == id)
    }

    /// The prompt for one category, with `[X]` replaced by its name.
    pub fn prompt(&self, index: usize) -> String {
        self.prompt_template.replace("[X]", &self.names[index])
    }
}

/// How the temperature enters the logit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TemperatureMode {
    /// `temperature * cos`, the usual logit-scale reading.
    #[default]
    Multiply,
    /// `cos / temperature`.
    Divide,
}

/// Confidence attached to exported predictions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Confidence {
    #[default]
    ClassScore,
    /// Class score times the tracklet's mean object score.
    ClassTimesObject,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    pub temperature: f64,
    pub temperature_mode: TemperatureMode,
    pub confidence: Confidence,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            temperature: 50.0,
            temperature_mode: TemperatureMode::Multiply,
            confidence: Confidence::ClassScore,
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(Error::Validation(format!(
                "temperature must be positive, got {}",
                self.temperature
            )));
        }
        Ok(())
    }

    fn logit(&self, cosine: f64) -> f64 {
        match self.temperature_mode {
            TemperatureMode::Multiply => self.temperature * cosine,
            TemperatureMode::Divide => cosine / self.temperature,
        }
    }
}

fn norm(v: ArrayView1<f64>) -> f64 {
    v.dot(&v).sqrt()
}

/// Sigmoid kept inside the open unit interval; in f64 it saturates to
/// exactly 1.0 for logits above ~37.
fn sigmoid(x: f64) -> f64 {
    let s = 1.0 / (1.0 + (-x).exp());
    s.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

/// `M × |C|` scores `sigmoid(tau(cos(e_cls_i, e_text_j)))`.
pub fn classification_scores(
    class_embeddings: &Array2<f64>,
    vocab: &Vocabulary,
    cfg: &ClassifierConfig,
) -> Result<Array2<f64>> {
    cfg.validate()?;
    if class_embeddings.ncols() != vocab.embed_dim() {
        return Err(Error::Dimension(format!(
            "class embeddings have dimension {}, text embeddings {}",
            class_embeddings.ncols(),
            vocab.embed_dim()
        )));
    }
    let text_norms: Vec<f64> = vocab.embeddings.rows().into_iter().map(norm).collect();
    let mut scores = class_embeddings.dot(&vocab.embeddings.t());
    for (i, mut row) in scores.axis_iter_mut(Axis(0)).enumerate() {
        let n = norm(class_embeddings.row(i));
        for (j, s) in row.iter_mut().enumerate() {
            if n == 0.0 {
                *s = 0.5;
                continue;
            }
            let cosine = (*s / (n * text_norms[j])).clamp(-1.0, 1.0);
            *s = sigmoid(cfg.logit(cosine));
        }
    }
    Ok(scores)
}

/// Scores every tracklet from its slot in the final memory bank.
pub fn classify_tracks(
    bank: &MemoryBank,
    tracklets: &mut [Tracklet],
    head: &ClassHead,
    vocab: &Vocabulary,
    cfg: &ClassifierConfig,
) -> Result<()> {
    if tracklets.len() != bank.len() {
        return Err(Error::InvalidInput(format!(
            "{} tracklets for {} memory slots",
            tracklets.len(),
            bank.len()
        )));
    }
    let class_embeddings = class_head_forward(bank.slots(), head)?;
    let scores = classification_scores(&class_embeddings, vocab, cfg)?;
    for tracklet in tracklets.iter_mut() {
        if tracklet.track_id >= bank.len() {
            return Err(Error::InvalidInput(format!(
                "tracklet id {} has no memory slot",
                tracklet.track_id
            )));
        }
        tracklet.class_scores = scores.row(tracklet.track_id).to_vec();
    }
    Ok(())
}

/// Baseline: each tracklet's scores are the mean of its associated proposals'
/// per-frame class scores.
pub fn classify_average(frames: &[FrameProposals], tracklets: &mut [Tracklet]) -> Result<()> {
    for tracklet in tracklets.iter_mut() {
        let mut sum: Option<Array1<f64>> = None;
        for tf in &tracklet.frames {
            let frame = frames.get(tf.frame_index).ok_or_else(|| {
                Error::InvalidInput(format!(
                    "tracklet references missing frame {}",
                    tf.frame_index
                ))
            })?;
            let scores = frame.class_scores().ok_or_else(|| {
                Error::Unsupported(format!(
                    "frame {} carries no per-frame class scores",
                    tf.frame_index
                ))
            })?;
            let row = scores.row(tf.proposal_index);
            match sum.as_mut() {
                Some(acc) => {
                    if acc.len() != row.len() {
                        return Err(Error::Dimension(
                            "per-frame class score width changes".into(),
                        ));
                    }
                    *acc += &row;
                }
                None => sum = Some(row.to_owned()),
            }
        }
        let count = tracklet.frames.len() as f64;
        tracklet.class_scores = sum.map(|s| (s / count).to_vec()).unwrap_or_default();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::RleMask;
    use crate::tracker::{track_video, TrackerConfig};
    use ndarray::array;
    use proptest::prelude::*;

    fn vocab(emb: Array2<f64>) -> Vocabulary {
        let c = emb.nrows();
        Vocabulary::new(
            (0..c as u64).collect(),
            (0..c).map(|i| format!("c{i}")).collect(),
            emb,
            vec![true; c],
            "this is a photo of [X]",
        )
        .unwrap()
    }

    #[test]
    fn head_examples() {
        let q = array![[1.0, -2.0], [0.5, 3.0]];
        assert_eq!(class_head_forward(&q, &ClassHead::identity(2)).unwrap(), q);

        let double = ClassHead::new(
            vec![Layer {
                weight: Array2::eye(2) * 2.0,
                bias: Array1::zeros(2),
            }],
            Activation::None,
        )
        .unwrap();
        assert_eq!(class_head_forward(&q, &double).unwrap(), q * 2.0);

        let relu = ClassHead::new(
            vec![
                Layer {
                    weight: Array2::eye(2),
                    bias: Array1::zeros(2),
                },
                Layer {
                    weight: array![[1.0, 1.0], [2.0, -1.0]],
                    bias: array![0.25, -0.5],
                },
            ],
            Activation::Relu,
        )
        .unwrap();
        let out = class_head_forward(&array![[-1.0, -1.0]], &relu).unwrap();
        assert_eq!(out, array![[0.25, -0.5]]);
    }

    #[test]
    fn head_rejects_broken_chain() {
        let err = ClassHead::new(
            vec![
                Layer {
                    weight: Array2::zeros((3, 2)),
                    bias: Array1::zeros(3),
                },
                Layer {
                    weight: Array2::zeros((2, 4)),
                    bias: Array1::zeros(2),
                },
            ],
            Activation::Relu,
        );
        assert!(matches!(err, Err(Error::Weights(_))));
        let q = array![[1.0, 2.0, 3.0]];
        assert!(matches!(
            class_head_forward(&q, &ClassHead::identity(2)),
            Err(Error::Weights(_))
        ));
    }

    #[test]
    fn score_examples() {
        let v = vocab(array![[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]]);
        let cfg = ClassifierConfig::default();
        let s = classification_scores(&array![[1.0, 0.0]], &v, &cfg).unwrap();
        assert!((s[[0, 0]] - 1.0).abs() < 1e-9);
        assert_eq!(s[[0, 1]], 0.5);
        assert!(s[[0, 2]].abs() < 1e-9);
        assert!(s[[0, 0]] < 1.0 && s[[0, 2]] > 0.0);

        let div = ClassifierConfig {
            temperature_mode: TemperatureMode::Divide,
            ..cfg
        };
        let s = classification_scores(&array![[1.0, 0.0]], &v, &div).unwrap();
        assert_eq!(s[[0, 1]], 0.5);
        assert!((s[[0, 0]] - 1.0 / (1.0 + (-0.02f64).exp())).abs() < 1e-15);

        let zero = classification_scores(&array![[0.0, 0.0]], &v, &cfg).unwrap();
        assert!(zero.iter().all(|&x| x == 0.5));
    }

    #[test]
    fn score_errors() {
        let v = vocab(array![[1.0, 0.0]]);
        assert!(matches!(
            classification_scores(&array![[1.0, 0.0, 0.0]], &v, &ClassifierConfig::default()),
            Err(Error::Dimension(_))
        ));
        let bad = ClassifierConfig {
            temperature: 0.0,
            ..Default::default()
        };
        assert!(classification_scores(&array![[1.0, 0.0]], &v, &bad).is_err());
    }

    #[test]
    fn vocabulary_validation() {
        let dup = Vocabulary::new(
            vec![0, 1],
            vec!["a".into(), "a".into()],
            array![[1.0], [1.0]],
            vec![true, false],
            "",
        );
        assert!(matches!(dup, Err(Error::Validation(_))));
        let zero = Vocabulary::new(
            vec![0],
            vec!["a".into()],
            array![[0.0, 0.0]],
            vec![true],
            "",
        );
        assert!(matches!(zero, Err(Error::Validation(_))));
        let v = vocab(array![[1.0]]);
        assert_eq!(v.prompt(0), "this is a photo of c0");
    }

    fn frames_for(emb: Array2<f64>) -> Vec<FrameProposals> {
        let n = emb.nrows();
        let masks = vec![RleMask::from_rect(2, 2, 0..1, 0..1).unwrap(); n];
        vec![FrameProposals::new(0, emb, vec![0.9; n], masks).unwrap()]
    }

    #[test]
    fn classify_tracks_own_category() {
        let emb = array![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let frames = frames_for(emb.clone());
        let (mut tracks, bank) = track_video(&frames, &TrackerConfig::default()).unwrap();
        let v = vocab(emb);
        classify_tracks(
            &bank,
            &mut tracks,
            &ClassHead::identity(3),
            &v,
            &ClassifierConfig::default(),
        )
        .unwrap();
        for (i, t) in tracks.iter().enumerate() {
            assert_eq!(t.class_scores.len(), 3);
            assert!((t.class_scores[i] - 1.0).abs() < 1e-9);
        }

        let one = vocab(array![[1.0, 1.0, 0.0]]);
        classify_tracks(
            &bank,
            &mut tracks,
            &ClassHead::identity(3),
            &one,
            &ClassifierConfig::default(),
        )
        .unwrap();
        assert!(tracks.iter().all(|t| t.class_scores.len() == 1));

        assert!(matches!(
            classify_tracks(
                &bank,
                &mut tracks[..2],
                &ClassHead::identity(3),
                &one,
                &ClassifierConfig::default()
            ),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn averaging_baseline() {
        let emb = array![[1.0, 0.0]];
        let mk = |t: usize, s: f64| {
            let masks = vec![RleMask::from_rect(2, 2, 0..1, 0..1).unwrap()];
            FrameProposals::new(t, emb.clone(), vec![0.9], masks)
                .unwrap()
                .with_class_scores(array![[s, 0.3]])
                .unwrap()
        };
        let frames = vec![mk(0, 0.1), mk(1, 0.5), mk(2, 0.9)];
        let (mut tracks, _) = track_video(&frames, &TrackerConfig::default()).unwrap();
        classify_average(&frames, &mut tracks).unwrap();
        assert!((tracks[0].class_scores[0] - 0.5).abs() < 1e-15);
        assert!((tracks[0].class_scores[1] - 0.3).abs() < 1e-15);

        let two = vec![mk(0, 0.2), mk(1, 0.8)];
        let (mut tracks, _) = track_video(&two, &TrackerConfig::default()).unwrap();
        classify_average(&two, &mut tracks).unwrap();
        assert_eq!(tracks[0].class_scores[0], 0.5);

        let bare = frames_for(emb.clone());
        let (mut tracks, _) = track_video(&bare, &TrackerConfig::default()).unwrap();
        assert!(matches!(
            classify_average(&bare, &mut tracks),
            Err(Error::Unsupported(_))
        ));
    }

    proptest! {
        #[test]
        fn scores_in_open_interval(
            e in proptest::collection::vec(-3.0f64..3.0, 6),
            t in proptest::collection::vec(-3.0f64..3.0, 9),
            temp in 0.01f64..200.0,
        ) {
            prop_assume!(t.chunks(3).all(|r| r.iter().any(|&x| x != 0.0)));
            let v = vocab(Array2::from_shape_vec((3, 3), t).unwrap());
            let q = Array2::from_shape_vec((2, 3), e).unwrap();
            for mode in [TemperatureMode::Multiply, TemperatureMode::Divide] {
                let cfg = ClassifierConfig { temperature: temp, temperature_mode: mode, ..Default::default() };
                let s = classification_scores(&q, &v, &cfg).unwrap();
                prop_assert!(s.iter().all(|&x| x > 0.0 && x < 1.0));
            }
        }
    }
}
