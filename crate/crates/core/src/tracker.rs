//! Tracking with a fixed bank of memory queries.
//!
//! The bank is seeded with the first frame's query embeddings, one slot per
//! proposal. Every later frame is matched to the bank by maximum-weight
//! assignment on the slot/query similarity matrix, and each slot then moves
//! towards its matched query by a momentum step whose size is the update
//! ratio `alpha` times the matched proposal's object score:
//!
//! ```text
//! slot <- alpha * s * query + (1 - alpha * s) * slot
//! ```
//!
//! A low object score (occlusion, disappearance) therefore leaves the slot
//! nearly untouched, so the object can be re-identified when it comes back.

use ndarray::{Array2, ArrayView1, Axis};
use serde::{Deserialize, Serialize};

use crate::assignment::{solve_assignment, WeightMatrix};
use crate::error::{Error, Result};
use crate::mask::RleMask;

/// One frame's proposals: `N` query embeddings of dimension `d`, with their
/// object scores and masks.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameProposals {
    frame_index: usize,
    embeddings: Array2<f64>,
    object_scores: Vec<f64>,
    masks: Vec<RleMask>,
    class_scores: Option<Array2<f64>>,
}

impl FrameProposals {
    pub fn new(
        frame_index: usize,
        embeddings: Array2<f64>,
        object_scores: Vec<f64>,
        masks: Vec<RleMask>,
    ) -> Result<Self> {
        let n = embeddings.nrows();
        if object_scores.len() != n || masks.len() != n {
            return Err(Error::Format(format!(
                "frame {frame_index}: {n} embeddings, {} object scores, {} masks",
                object_scores.len(),
                masks.len()
            )));
        }
        if let Some(k) = object_scores.iter().position(|s| !(0.0..=1.0).contains(s)) {
            return Err(Error::Validation(format!(
                "frame {frame_index}: object score {} of proposal {k} outside [0, 1]",
                object_scores[k]
            )));
        }
        if embeddings.iter().any(|x| !x.is_finite()) {
            return Err(Error::Validation(format!(
                "frame {frame_index}: non-finite embedding value"
            )));
        }
        Ok(FrameProposals {
            frame_index,
            embeddings,
            object_scores,
            masks,
            class_scores: None,
        })
    }

    /// Attaches per-proposal class scores (`N × |C|`), used by score averaging.
    pub fn with_class_scores(mut self, scores: Array2<f64>) -> Result<Self> {
        if scores.nrows() != self.len() {
            return Err(Error::Format(format!(
                "frame {}: {} class-score rows for {} proposals",
                self.frame_index,
                scores.nrows(),
                self.len()
            )));
        }
        if scores.iter().any(|s| !(0.0..=1.0).contains(s)) {
            return Err(Error::Validation(format!(
                "frame {}: class score outside [0, 1]",
                self.frame_index
            )));
        }
        self.class_scores = Some(scores);
        Ok(self)
    }

    pub fn frame_index(&self) -> usize {
        self.frame_index
    }

    pub fn embeddings(&self) -> &Array2<f64> {
        &self.embeddings
    }

    pub fn object_scores(&self) -> &[f64] {
        &self.object_scores
    }

    pub fn masks(&self) -> &[RleMask] {
        &self.masks
    }

    pub fn class_scores(&self) -> Option<&Array2<f64>> {
        self.class_scores.as_ref()
    }

    pub fn len(&self) -> usize {
        self.embeddings.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn embed_dim(&self) -> usize {
        self.embeddings.ncols()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Similarity {
    #[default]
    #[serde(rename = "inner")]
    InnerProduct,
    #[serde(rename = "cosine")]
    Cosine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackerConfig {
    /// Update ratio of the momentum step, in `[0, 1]`.
    pub alpha: f64,
    pub similarity: Similarity,
    /// When false the object score is treated as 1 in the momentum step.
    pub gate_with_object_score: bool,
    /// Masks of proposals scoring below this are emitted as absent.
    pub mask_emit_threshold: f64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            alpha: 0.7,
            similarity: Similarity::InnerProduct,
            gate_with_object_score: true,
            mask_emit_threshold: 0.0,
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Validation(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        if !(0.0..=1.0).contains(&self.mask_emit_threshold) {
            return Err(Error::Validation(format!(
                "mask_emit_threshold must lie in [0, 1], got {}",
                self.mask_emit_threshold
            )));
        }
        Ok(())
    }
}

/// The memory queries of one video plus per-slot association history.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryBank {
    slots: Array2<f64>,
    last_scores: Vec<f64>,
    history: Vec<Vec<(usize, usize)>>,
}

impl MemoryBank {
    pub fn slots(&self) -> &Array2<f64> {
        &self.slots
    }

    pub fn last_scores(&self) -> &[f64] {
        &self.last_scores
    }

    /// Per slot, the `(frame_index, proposal_index)` it was associated with.
    pub fn history(&self) -> &[Vec<(usize, usize)>] {
        &self.history
    }

    pub fn len(&self) -> usize {
        self.slots.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn embed_dim(&self) -> usize {
        self.slots.ncols()
    }

    fn frames_seen(&self) -> usize {
        self.history.first().map_or(0, Vec::len)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackFrame {
    pub frame_index: usize,
    pub proposal_index: usize,
    pub mask: Option<RleMask>,
    pub object_score: f64,
}

/// One memory slot's output over a whole video.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tracklet {
    pub track_id: usize,
    pub frames: Vec<TrackFrame>,
    /// One score per vocabulary category; empty until classified.
    pub class_scores: Vec<f64>,
    pub mean_object_score: f64,
}

impl Tracklet {
    pub fn has_foreground(&self) -> bool {
        self.frames
            .iter()
            .any(|f| f.mask.as_ref().is_some_and(|m| !m.is_empty()))
    }
}

pub fn init_memory(first: &FrameProposals) -> Result<MemoryBank> {
    if first.frame_index != 0 {
        return Err(Error::InvalidInput(format!(
            "memory must be initialised from frame 0, got frame {}",
            first.frame_index
        )));
    }
    if first.is_empty() {
        return Err(Error::EmptyVideo);
    }
    Ok(MemoryBank {
        slots: first.embeddings.clone(),
        last_scores: first.object_scores.clone(),
        history: (0..first.len()).map(|i| vec![(0, i)]).collect(),
    })
}

fn dot(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.dot(&b)
}

/// `N × N` slot/query similarities; entry `(i, j)` compares slot `i` with query `j`.
pub fn similarity_matrix(
    bank: &MemoryBank,
    frame: &FrameProposals,
    mode: Similarity,
) -> Result<WeightMatrix> {
    if bank.embed_dim() != frame.embed_dim() {
        return Err(Error::Dimension(format!(
            "memory dimension {} vs frame {} embedding dimension {}",
            bank.embed_dim(),
            frame.frame_index,
            frame.embed_dim()
        )));
    }
    let mut sims = bank.slots.dot(&frame.embeddings.t());
    if mode == Similarity::Cosine {
        let slot_norms: Vec<f64> = bank
            .slots
            .rows()
            .into_iter()
            .map(|r| dot(r, r).sqrt())
            .collect();
        let query_norms: Vec<f64> = frame
            .embeddings
            .rows()
            .into_iter()
            .map(|r| dot(r, r).sqrt())
            .collect();
        for ((i, j), s) in sims.indexed_iter_mut() {
            let denom = slot_norms[i] * query_norms[j];
            *s = if denom > 0.0 { *s / denom } else { 0.0 };
        }
    }
    let (rows, cols) = sims.dim();
    WeightMatrix::new(rows, cols, sims.into_iter().collect())
}

/// Matches the frame's proposals to the memory slots. Returns `p` with
/// slot `i` receiving proposal `p[i]`, and appends to the slot histories.
pub fn associate(
    bank: &mut MemoryBank,
    frame: &FrameProposals,
    cfg: &TrackerConfig,
) -> Result<Vec<usize>> {
    if frame.frame_index == 0 {
        return Err(Error::InvalidInput(
            "frame 0 initialises the memory and cannot be associated".into(),
        ));
    }
    if frame.len() != bank.len() {
        return Err(Error::Format(format!(
            "frame {} has {} proposals, memory has {} slots",
            frame.frame_index,
            frame.len(),
            bank.len()
        )));
    }
    let sims = similarity_matrix(bank, frame, cfg.similarity)?;
    let pairs = solve_assignment(&sims)?;
    if pairs.len() != bank.len() {
        return Err(Error::InvalidAssociation(format!(
            "assignment covers {} of {} slots",
            pairs.len(),
            bank.len()
        )));
    }
    let perm: Vec<usize> = pairs.iter().map(|&(_, j)| j).collect();
    for (slot, &j) in perm.iter().enumerate() {
        bank.history[slot].push((frame.frame_index, j));
    }
    Ok(perm)
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::InvalidAssociation(format!(
            "permutation of length {} for {n} slots",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &j in perm {
        if j >= n || std::mem::replace(&mut seen[j], true) {
            return Err(Error::InvalidAssociation(format!(
                "proposal index {j} out of range or repeated"
            )));
        }
    }
    Ok(())
}

/// Applies the gated momentum step to every slot.
pub fn update_memory(
    bank: &mut MemoryBank,
    frame: &FrameProposals,
    perm: &[usize],
    cfg: &TrackerConfig,
) -> Result<()> {
    check_permutation(perm, bank.len())?;
    if frame.len() != bank.len() || frame.embed_dim() != bank.embed_dim() {
        return Err(Error::Dimension(format!(
            "frame {} shape {}x{} vs memory {}x{}",
            frame.frame_index,
            frame.len(),
            frame.embed_dim(),
            bank.len(),
            bank.embed_dim()
        )));
    }
    for (slot, mut memory) in bank.slots.axis_iter_mut(Axis(0)).enumerate() {
        let j = perm[slot];
        let score = frame.object_scores[j];
        let s = if cfg.gate_with_object_score {
            score
        } else {
            1.0
        };
        let weight = cfg.alpha * s;
        bank.last_scores[slot] = s;
        let query = frame.embeddings.row(j);
        if weight == 0.0 {
            continue;
        }
        if weight == 1.0 {
            memory.assign(&query);
            continue;
        }
        for (m, &q) in memory.iter_mut().zip(query.iter()) {
            let blended = weight * q + (1.0 - weight) * *m;
            // rounding may land one ulp outside the segment [m, q]
            *m = blended.clamp(m.min(q), m.max(q));
        }
    }
    Ok(())
}

fn validate_video(frames: &[FrameProposals]) -> Result<()> {
    let first = frames
        .first()
        .ok_or_else(|| Error::Format("video has no frames".into()))?;
    let (n, d) = (first.len(), first.embed_dim());
    for (t, frame) in frames.iter().enumerate() {
        if frame.frame_index != t {
            return Err(Error::Format(format!(
                "frame at position {t} has frame_index {}; indices must run 0..T-1",
                frame.frame_index
            )));
        }
        if frame.len() != n || frame.embed_dim() != d {
            return Err(Error::Format(format!(
                "frame {t} has {} proposals of dimension {}, expected {n} of dimension {d}",
                frame.len(),
                frame.embed_dim()
            )));
        }
    }
    Ok(())
}

/// Tracks a whole video and returns one tracklet per memory slot together
/// with the final memory bank.
pub fn track_video(
    frames: &[FrameProposals],
    cfg: &TrackerConfig,
) -> Result<(Vec<Tracklet>, MemoryBank)> {
    cfg.validate()?;
    validate_video(frames)?;
    let mut bank = init_memory(&frames[0])?;
    for frame in &frames[1..] {
        let perm = associate(&mut bank, frame, cfg)?;
        update_memory(&mut bank, frame, &perm, cfg)?;
    }
    if bank.frames_seen() != frames.len() {
        return Err(Error::InvalidAssociation(
            "slot history length differs from frame count".into(),
        ));
    }
    let tracklets = build_tracklets(&bank, frames, cfg);
    Ok((tracklets, bank))
}

fn build_tracklets(
    bank: &MemoryBank,
    frames: &[FrameProposals],
    cfg: &TrackerConfig,
) -> Vec<Tracklet> {
    bank.history
        .iter()
        .enumerate()
        .map(|(track_id, history)| {
            let frames_out: Vec<TrackFrame> = history
                .iter()
                .map(|&(t, j)| {
                    let frame = &frames[t];
                    let score = frame.object_scores[j];
                    TrackFrame {
                        frame_index: t,
                        proposal_index: j,
                        mask: (score >= cfg.mask_emit_threshold).then(|| frame.masks[j].clone()),
                        object_score: score,
                    }
                })
                .collect();
            let mean_object_score =
                frames_out.iter().map(|f| f.object_score).sum::<f64>() / frames_out.len() as f64;
            Tracklet {
                track_id,
                frames: frames_out,
                class_scores: Vec::new(),
                mean_object_score,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    fn frame(index: usize, emb: Array2<f64>, scores: Vec<f64>) -> FrameProposals {
        let n = emb.nrows();
        let masks = (0..n)
            .map(|i| RleMask::from_rect(4, 4, 0..1, i as u32..i as u32 + 1).unwrap())
            .collect();
        FrameProposals::new(index, emb, scores, masks).unwrap()
    }

    #[test]
    fn init_copies_first_frame() {
        let f = frame(0, array![[1.0, 0.0], [0.0, 1.0]], vec![0.2, 0.9]);
        let bank = init_memory(&f).unwrap();
        assert_eq!(bank.slots(), &array![[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(bank.last_scores(), &[0.2, 0.9]);
        assert_eq!(bank.history(), &[vec![(0, 0)], vec![(0, 1)]]);
    }

    #[test]
    fn init_rejects_empty() {
        let f = FrameProposals::new(0, Array2::zeros((0, 2)), vec![], vec![]).unwrap();
        assert!(matches!(init_memory(&f), Err(Error::EmptyVideo)));
    }

    #[test]
    fn similarity_examples() {
        let bank = init_memory(&frame(0, array![[1.0, 0.0], [0.0, 1.0]], vec![1.0, 1.0])).unwrap();
        let f1 = frame(1, array![[0.9, 0.1], [0.2, 0.8]], vec![1.0, 1.0]);
        let w = similarity_matrix(&bank, &f1, Similarity::InnerProduct).unwrap();
        assert_eq!(w.row(0), &[0.9, 0.2]);
        assert_eq!(w.row(1), &[0.1, 0.8]);

        let same = frame(1, array![[1.0, 0.0], [0.0, 1.0]], vec![1.0, 1.0]);
        let w = similarity_matrix(&bank, &same, Similarity::InnerProduct).unwrap();
        assert_eq!(w.row(0), &[1.0, 0.0]);
        assert_eq!(w.row(1), &[0.0, 1.0]);

        let b2 = init_memory(&frame(0, array![[2.0, 0.0]], vec![1.0])).unwrap();
        let f = frame(1, array![[1.0, 0.0]], vec![1.0]);
        assert_eq!(
            similarity_matrix(&b2, &f, Similarity::Cosine)
                .unwrap()
                .get(0, 0),
            1.0
        );
        let zero = frame(1, array![[0.0, 0.0]], vec![1.0]);
        assert_eq!(
            similarity_matrix(&b2, &zero, Similarity::Cosine)
                .unwrap()
                .get(0, 0),
            0.0
        );
    }

    #[test]
    fn similarity_dimension_mismatch() {
        let bank = init_memory(&frame(0, array![[1.0, 0.0]], vec![1.0])).unwrap();
        let f = frame(1, array![[1.0, 0.0, 0.0]], vec![1.0]);
        assert!(matches!(
            similarity_matrix(&bank, &f, Similarity::InnerProduct),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn associate_examples() {
        let cfg = TrackerConfig::default();
        let f0 = frame(0, array![[1.0, 0.0], [0.0, 1.0]], vec![1.0, 1.0]);
        let mut bank = init_memory(&f0).unwrap();
        let same = frame(1, f0.embeddings().clone(), vec![1.0, 1.0]);
        assert_eq!(
            associate(&mut bank.clone(), &same, &cfg).unwrap(),
            vec![0, 1]
        );

        let swapped = frame(1, array![[0.0, 1.0], [1.0, 0.0]], vec![1.0, 1.0]);
        assert_eq!(associate(&mut bank, &swapped, &cfg).unwrap(), vec![1, 0]);
        assert_eq!(bank.history()[0], vec![(0, 0), (1, 1)]);
        assert_eq!(bank.history()[1], vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn associate_on_three_by_three_example() {
        let eye = array![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let mut bank = init_memory(&frame(0, eye, vec![1.0; 3])).unwrap();
        // with identity slots the similarity matrix is the embedding matrix transposed
        let emb = array![[0.9, 0.2, 0.0], [0.1, 0.8, 0.3], [0.0, 0.1, 0.7]];
        let f = frame(1, emb, vec![1.0; 3]);
        let cfg = TrackerConfig::default();
        assert_eq!(associate(&mut bank, &f, &cfg).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn associate_rejects_frame_zero() {
        let f0 = frame(0, array![[1.0]], vec![1.0]);
        let mut bank = init_memory(&f0).unwrap();
        assert!(associate(&mut bank, &f0, &TrackerConfig::default()).is_err());
    }

    #[test]
    fn update_examples() {
        let f0 = frame(0, array![[1.0, 0.0], [0.0, 1.0]], vec![1.0, 1.0]);
        let f1 = frame(1, array![[0.0, 1.0], [0.3, 0.3]], vec![0.5, 0.0]);

        let mut frozen = init_memory(&f0).unwrap();
        let cfg0 = TrackerConfig {
            alpha: 0.0,
            ..Default::default()
        };
        update_memory(&mut frozen, &f1, &[0, 1], &cfg0).unwrap();
        assert_eq!(frozen.slots(), f0.embeddings());

        let mut bank = init_memory(&f0).unwrap();
        update_memory(&mut bank, &f1, &[0, 1], &TrackerConfig::default()).unwrap();
        // alpha * s = 0.35 on slot 0; slot 1 gated by a zero score
        assert!((bank.slots()[[0, 0]] - 0.65).abs() < 1e-15);
        assert!((bank.slots()[[0, 1]] - 0.35).abs() < 1e-15);
        assert_eq!(bank.slots().row(1), f0.embeddings().row(1));
        assert_eq!(bank.last_scores(), &[0.5, 0.0]);
    }

    #[test]
    fn update_without_gate_uses_unit_score() {
        let f0 = frame(0, array![[1.0, 0.0]], vec![1.0]);
        let f1 = frame(1, array![[0.0, 1.0]], vec![0.0]);
        let mut bank = init_memory(&f0).unwrap();
        let cfg = TrackerConfig {
            alpha: 1.0,
            gate_with_object_score: false,
            ..Default::default()
        };
        update_memory(&mut bank, &f1, &[0], &cfg).unwrap();
        assert_eq!(bank.slots(), f1.embeddings());
    }

    #[test]
    fn update_rejects_non_bijection() {
        let f0 = frame(0, array![[1.0, 0.0], [0.0, 1.0]], vec![1.0, 1.0]);
        let mut bank = init_memory(&f0).unwrap();
        let f1 = frame(1, f0.embeddings().clone(), vec![1.0, 1.0]);
        let cfg = TrackerConfig::default();
        assert!(matches!(
            update_memory(&mut bank, &f1, &[0, 0], &cfg),
            Err(Error::InvalidAssociation(_))
        ));
        assert!(matches!(
            update_memory(&mut bank, &f1, &[0], &cfg),
            Err(Error::InvalidAssociation(_))
        ));
    }

    #[test]
    fn track_single_frame() {
        let f0 = frame(0, array![[1.0, 0.0], [0.0, 1.0]], vec![0.4, 0.8]);
        let (tracks, _) =
            track_video(std::slice::from_ref(&f0), &TrackerConfig::default()).unwrap();
        assert_eq!(tracks.len(), 2);
        assert_eq!(tracks[1].frames.len(), 1);
        assert_eq!(tracks[1].mean_object_score, 0.8);
        assert_eq!(tracks[1].frames[0].mask.as_ref(), Some(&f0.masks()[1]));
    }

    #[test]
    fn track_follows_swapped_rows() {
        let f0 = frame(0, array![[1.0, 0.0], [0.0, 1.0]], vec![1.0, 1.0]);
        let m = f0.masks().to_vec();
        let f1 = FrameProposals::new(
            1,
            array![[0.0, 1.0], [1.0, 0.0]],
            vec![1.0, 1.0],
            vec![m[1].clone(), m[0].clone()],
        )
        .unwrap();
        let (tracks, _) = track_video(&[f0, f1], &TrackerConfig::default()).unwrap();
        for (i, t) in tracks.iter().enumerate() {
            assert!(t.frames.iter().all(|f| f.mask.as_ref() == Some(&m[i])));
        }
    }

    #[test]
    fn mask_emit_threshold_suppresses_low_scores() {
        let f0 = frame(0, array![[1.0, 0.0], [0.0, 1.0]], vec![0.9, 0.05]);
        let cfg = TrackerConfig {
            mask_emit_threshold: 0.5,
            ..Default::default()
        };
        let (tracks, _) = track_video(&[f0], &cfg).unwrap();
        assert!(tracks[0].frames[0].mask.is_some());
        assert!(tracks[1].frames[0].mask.is_none());
    }

    #[test]
    fn track_rejects_bad_videos() {
        let cfg = TrackerConfig::default();
        assert!(matches!(track_video(&[], &cfg), Err(Error::Format(_))));
        let f0 = frame(0, array![[1.0, 0.0]], vec![1.0]);
        let gap = frame(2, array![[1.0, 0.0]], vec![1.0]);
        assert!(matches!(
            track_video(&[f0.clone(), gap], &cfg),
            Err(Error::Format(_))
        ));
        let wide = frame(1, array![[1.0, 0.0], [0.0, 1.0]], vec![1.0, 1.0]);
        assert!(matches!(
            track_video(&[f0.clone(), wide], &cfg),
            Err(Error::Format(_))
        ));
        let deep = frame(1, array![[1.0, 0.0, 0.0]], vec![1.0]);
        assert!(matches!(
            track_video(&[f0.clone(), deep], &cfg),
            Err(Error::Format(_))
        ));
        let bad = TrackerConfig {
            alpha: 1.5,
            ..Default::default()
        };
        assert!(matches!(
            track_video(&[f0], &bad),
            Err(Error::Validation(_))
        ));
    }

    fn video_strategy() -> impl Strategy<Value = Vec<FrameProposals>> {
        (1usize..=5, 1usize..=4, 1usize..=6).prop_flat_map(|(n, d, t)| {
            proptest::collection::vec(
                (
                    proptest::collection::vec(-2.0f64..2.0, n * d),
                    proptest::collection::vec(0.0f64..=1.0, n),
                ),
                t,
            )
            .prop_map(move |raw| {
                raw.into_iter()
                    .enumerate()
                    .map(|(i, (e, s))| frame(i, Array2::from_shape_vec((n, d), e).unwrap(), s))
                    .collect()
            })
        })
    }

    proptest! {
        #[test]
        fn frozen_memory_keeps_first_frame(video in video_strategy()) {
            let cfg = TrackerConfig { alpha: 0.0, ..Default::default() };
            let (_, bank) = track_video(&video, &cfg).unwrap();
            prop_assert_eq!(bank.slots(), video[0].embeddings());
        }

        #[test]
        fn every_slot_history_spans_the_video(video in video_strategy(), alpha in 0.0f64..=1.0) {
            let cfg = TrackerConfig { alpha, ..Default::default() };
            let (tracks, bank) = track_video(&video, &cfg).unwrap();
            prop_assert_eq!(tracks.len(), video[0].len());
            for h in bank.history() {
                prop_assert_eq!(h.len(), video.len());
            }
            // at every frame the slots take each proposal exactly once
            for t in 0..video.len() {
                let mut used: Vec<usize> = tracks.iter().map(|tr| tr.frames[t].proposal_index).collect();
                used.sort_unstable();
                prop_assert_eq!(used, (0..video[0].len()).collect::<Vec<_>>());
            }
        }

        #[test]
        fn tracking_is_deterministic(video in video_strategy()) {
            let cfg = TrackerConfig::default();
            let a = track_video(&video, &cfg).unwrap();
            let b = track_video(&video, &cfg).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
