//! Tracking, classification and export chained over whole videos.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{classify_average, classify_tracks, ClassHead, Vocabulary};
use crate::dataio::{sort_predictions, tracklets_to_predictions, RunSettings, VideoProposals};
use crate::error::{Error, Result};
use crate::evaluator::{evaluate, EvalReport, GroundTruth, Prediction};
use crate::synth::Fixture;
use crate::tracker::{track_video, Tracklet};

/// Where tracklet class scores come from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifyMode {
    /// Score the final memory query of each slot.
    #[default]
    Memory,
    /// Average the per-frame class scores of the associated proposals.
    Average,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Pipeline {
    pub settings: RunSettings,
    pub classify: ClassifyMode,
}

impl Pipeline {
    pub fn new(settings: RunSettings, classify: ClassifyMode) -> Self {
        Pipeline { settings, classify }
    }

    /// Tracks and classifies one video.
    pub fn tracklets(
        &self,
        video: &VideoProposals,
        head: &ClassHead,
        vocab: &Vocabulary,
    ) -> Result<Vec<Tracklet>> {
        let (mut tracklets, bank) = track_video(&video.frames, &self.settings.tracker)?;
        match self.classify {
            ClassifyMode::Memory => classify_tracks(
                &bank,
                &mut tracklets,
                head,
                vocab,
                &self.settings.classifier,
            )?,
            ClassifyMode::Average => classify_average(&video.frames, &mut tracklets)?,
        }
        Ok(tracklets)
    }

    pub fn predict_video(
        &self,
        video: &VideoProposals,
        head: &ClassHead,
        vocab: &Vocabulary,
    ) -> Result<Vec<Prediction>> {
        if video.embed_dim != head.input_dim() {
            return Err(Error::Dimension(format!(
                "video {:?} has {}-d queries, class head expects {}",
                video.video_id,
                video.embed_dim,
                head.input_dim()
            )));
        }
        let tracklets = self.tracklets(video, head, vocab)?;
        tracklets_to_predictions(
            &video.video_id,
            &tracklets,
            vocab,
            &self.settings.export,
            self.settings.classifier.confidence,
        )
    }

    /// Predictions for every video, processed in parallel, in a fixed order.
    pub fn predict(
        &self,
        videos: &[VideoProposals],
        head: &ClassHead,
        vocab: &Vocabulary,
    ) -> Result<Vec<Prediction>> {
        let per_video: Vec<Vec<Prediction>> = videos
            .par_iter()
            .map(|v| self.predict_video(v, head, vocab))
            .collect::<Result<_>>()?;
        let mut preds: Vec<Prediction> = per_video.into_iter().flatten().collect();
        sort_predictions(&mut preds);
        Ok(preds)
    }

    pub fn evaluate(
        &self,
        preds: &[Prediction],
        gt: &GroundTruth,
        vocab: &Vocabulary,
    ) -> Result<EvalReport> {
        evaluate(preds, gt, vocab, &self.settings.eval)
    }

    /// Runs a generated fixture end to end.
    pub fn run_fixture(&self, fixture: &Fixture) -> Result<(Vec<Prediction>, EvalReport)> {
        let preds = self.predict(&fixture.videos, &fixture.class_head, &fixture.vocabulary)?;
        let report = self.evaluate(&preds, &fixture.ground_truth, &fixture.vocabulary)?;
        Ok((preds, report))
    }
}
