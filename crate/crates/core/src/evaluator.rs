//! Video mAP: spatio-temporal mask IoU, greedy per-category matching, AP over
//! a ladder of IoU thresholds and the mean over base and novel categories.
//!
//! Matching follows the COCO / YouTube-VIS convention. Predictions of one
//! category are visited by decreasing confidence (stable in input order); each
//! takes the unmatched ground-truth instance of the same video and category
//! with the highest IoU, provided it reaches the threshold. AP uses
//! interpolated precision at evenly spaced recall levels.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::Vocabulary;
use crate::error::{Error, Result};
use crate::mask::RleMask;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VideoMeta {
    pub id: String,
    pub height: u32,
    pub width: u32,
    pub frame_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryMeta {
    pub id: u64,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GtInstance {
    pub video_id: String,
    pub category_id: u64,
    /// One entry per video frame; `None` where the instance is absent.
    pub masks: Vec<Option<RleMask>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub video_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub track_id: Option<usize>,
    pub category_id: u64,
    pub score: f64,
    pub masks: Vec<Option<RleMask>>,
}

/// Annotated videos, their category list and instances.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GroundTruth {
    pub videos: Vec<VideoMeta>,
    pub categories: Vec<CategoryMeta>,
    pub instances: Vec<GtInstance>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ApMode {
    /// Mean interpolated precision at `recall_points` recall levels.
    #[default]
    Interpolated,
    /// Trapezoidal area through the operating points, each carrying the
    /// best precision at or after it.
    Trapezoid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub iou_thresholds: Vec<f64>,
    pub recall_points: usize,
    pub max_dets_per_video: usize,
    pub ap_mode: ApMode,
}

/// `0.50, 0.55, ..., 0.95`.
pub fn default_iou_thresholds() -> Vec<f64> {
    (0..10).map(|k| (50 + 5 * k) as f64 / 100.0).collect()
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            iou_thresholds: default_iou_thresholds(),
            recall_points: 101,
            max_dets_per_video: 100,
            ap_mode: ApMode::Interpolated,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iou_thresholds.is_empty() {
            return Err(Error::Validation("no IoU thresholds".into()));
        }
        if self.iou_thresholds.iter().any(|&t| !(t > 0.0 && t <= 1.0)) {
            return Err(Error::Validation(
                "IoU thresholds must lie in (0, 1]".into(),
            ));
        }
        if self.iou_thresholds.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Validation(
                "IoU thresholds must be strictly increasing".into(),
            ));
        }
        if self.recall_points < 2 {
            return Err(Error::Validation("recall_points must be at least 2".into()));
        }
        if self.max_dets_per_video == 0 {
            return Err(Error::Validation(
                "max_dets_per_video must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Summed per-frame intersections over summed per-frame unions. Missing or
/// `None` frames count as empty; an empty union yields 0.
pub fn st_iou(pred: &[Option<RleMask>], gt: &[Option<RleMask>]) -> Result<f64> {
    let frames = pred.len().max(gt.len());
    let (mut inter, mut union) = (0u64, 0u64);
    for t in 0..frames {
        let p = pred.get(t).and_then(Option::as_ref);
        let g = gt.get(t).and_then(Option::as_ref);
        match (p, g) {
            (Some(p), Some(g)) => {
                let i = p.intersection_area(g)?;
                inter += i;
                union += p.area() + g.area() - i;
            }
            (Some(m), None) | (None, Some(m)) => union += m.area(),
            (None, None) => {}
        }
    }
    Ok(if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    })
}

/// Greedy matching on a precomputed IoU table (`None` = different video).
fn greedy_match(ious: &[Vec<Option<f64>>], n_gt: usize, threshold: f64) -> Vec<bool> {
    let mut taken = vec![false; n_gt];
    ious.iter()
        .map(|row| {
            let mut best: Option<(usize, f64)> = None;
            for (g, iou) in row.iter().enumerate() {
                let Some(iou) = *iou else { continue };
                if taken[g] || iou < threshold {
                    continue;
                }
                if best.is_none_or(|(_, b)| iou > b) {
                    best = Some((g, iou));
                }
            }
            match best {
                Some((g, _)) => {
                    taken[g] = true;
                    true
                }
                None => false,
            }
        })
        .collect()
}

fn iou_table(preds: &[&Prediction], gts: &[&GtInstance]) -> Result<Vec<Vec<Option<f64>>>> {
    preds
        .iter()
        .map(|p| {
            gts.iter()
                .map(|g| {
                    if p.video_id == g.video_id {
                        st_iou(&p.masks, &g.masks).map(Some)
                    } else {
                        Ok(None)
                    }
                })
                .collect()
        })
        .collect()
}

/// True-positive flags for `preds` (already sorted by decreasing confidence)
/// against the ground truth of the same category.
pub fn match_category(
    preds: &[&Prediction],
    gts: &[&GtInstance],
    threshold: f64,
) -> Result<Vec<bool>> {
    let ious = iou_table(preds, gts)?;
    Ok(greedy_match(&ious, gts.len(), threshold))
}

/// Cumulative recall and right-to-left maximum precision.
fn precision_envelope(flags: &[bool], n_gt: usize) -> (Vec<f64>, Vec<f64>) {
    let mut recall = Vec::with_capacity(flags.len());
    let mut precision = Vec::with_capacity(flags.len());
    let (mut tp, mut fp) = (0usize, 0usize);
    for &hit in flags {
        if hit {
            tp += 1;
        } else {
            fp += 1;
        }
        recall.push(tp as f64 / n_gt as f64);
        precision.push(tp as f64 / (tp + fp) as f64);
    }
    for k in (1..precision.len()).rev() {
        precision[k - 1] = precision[k - 1].max(precision[k]);
    }
    (recall, precision)
}

/// Interpolated AP: mean over `recall_points` evenly spaced recall levels of
/// the best precision reached at or beyond that recall. `None` when there is
/// no ground truth.
pub fn average_precision(flags: &[bool], n_gt: usize, recall_points: usize) -> Option<f64> {
    average_precision_with(flags, n_gt, recall_points, ApMode::Interpolated)
}

pub fn average_precision_with(
    flags: &[bool],
    n_gt: usize,
    recall_points: usize,
    mode: ApMode,
) -> Option<f64> {
    if n_gt == 0 {
        return None;
    }
    let (recall, precision) = precision_envelope(flags, n_gt);
    match mode {
        ApMode::Interpolated => {
            let steps = (recall_points - 1) as f64;
            let total: f64 = (0..recall_points)
                .map(|k| {
                    let level = k as f64 / steps;
                    let idx = recall.partition_point(|&r| r < level);
                    precision.get(idx).copied().unwrap_or(0.0)
                })
                .sum();
            Some(total / recall_points as f64)
        }
        ApMode::Trapezoid => {
            let mut area = 0.0;
            let (mut prev_r, mut prev_p) = (0.0, precision.first().copied().unwrap_or(0.0));
            for (&r, &p) in recall.iter().zip(&precision) {
                area += (r - prev_r) * (p + prev_p) / 2.0;
                prev_r = r;
                prev_p = p;
            }
            Some(area)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryResult {
    pub id: u64,
    pub name: String,
    pub base: bool,
    /// `None` when the category has no ground truth.
    pub ap: Option<f64>,
    pub n_gt: usize,
    pub n_pred: usize,
    /// True positives at each IoU threshold.
    pub matched: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    #[serde(rename = "mAP")]
    pub map: Option<f64>,
    #[serde(rename = "mAP_b")]
    pub map_base: Option<f64>,
    #[serde(rename = "mAP_n")]
    pub map_novel: Option<f64>,
    pub iou_thresholds: Vec<f64>,
    pub per_category: BTreeMap<String, CategoryResult>,
}

fn mean_defined<'a>(aps: impl Iterator<Item = &'a Option<f64>>) -> Option<f64> {
    let defined: Vec<f64> = aps.flatten().copied().collect();
    (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
}

impl EvalReport {
    /// Per-category results sorted by category id.
    pub fn categories(&self) -> Vec<&CategoryResult> {
        let mut v: Vec<_> = self.per_category.values().collect();
        v.sort_by_key(|c| c.id);
        v
    }

    pub fn ap_of(&self, name: &str) -> Option<f64> {
        self.per_category.get(name).and_then(|c| c.ap)
    }

    /// Aligned plain-text table.
    pub fn to_table(&self) -> String {
        let fmt =
            |x: Option<f64>| x.map_or_else(|| "-".to_string(), |v| format!("{:.4}", 100.0 * v));
        let width = self
            .per_category
            .keys()
            .map(String::len)
            .max()
            .unwrap_or(0)
            .max("category".len());
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<width$}  {:>6}  {:>5}  {:>6}  {:>6}  {:>8}",
            "category", "id", "split", "n_gt", "n_pred", "AP"
        );
        for c in self.categories() {
            let _ = writeln!(
                out,
                "{:<width$}  {:>6}  {:>5}  {:>6}  {:>6}  {:>8}",
                c.name,
                c.id,
                if c.base { "base" } else { "novel" },
                c.n_gt,
                c.n_pred,
                fmt(c.ap)
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "{:<width$}  {:>8}", "mAP", fmt(self.map));
        let _ = writeln!(out, "{:<width$}  {:>8}", "mAP_b", fmt(self.map_base));
        let _ = writeln!(out, "{:<width$}  {:>8}", "mAP_n", fmt(self.map_novel));
        out
    }
}

fn check_masks(what: &str, masks: &[Option<RleMask>], video: &VideoMeta) -> Result<()> {
    if masks.len() > video.frame_count {
        return Err(Error::Validation(format!(
            "{what} has {} frames, video {:?} has {}",
            masks.len(),
            video.id,
            video.frame_count
        )));
    }
    for (t, m) in masks.iter().enumerate() {
        if let Some(m) = m {
            if m.height() != video.height || m.width() != video.width {
                return Err(Error::Validation(format!(
                    "{what}: frame {t} mask is {}x{}, video {:?} is {}x{}",
                    m.height(),
                    m.width(),
                    video.id,
                    video.height,
                    video.width
                )));
            }
        }
    }
    Ok(())
}

/// Keeps the `max_dets` most confident predictions of each video; returns
/// indices into `preds` in their original order.
fn cap_per_video(preds: &[Prediction], max_dets: usize) -> Vec<usize> {
    let mut by_video: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, p) in preds.iter().enumerate() {
        by_video.entry(p.video_id.as_str()).or_default().push(i);
    }
    let mut keep: Vec<usize> = Vec::with_capacity(preds.len());
    for (_, mut idx) in by_video {
        idx.sort_by(|&a, &b| preds[b].score.total_cmp(&preds[a].score).then(a.cmp(&b)));
        idx.truncate(max_dets);
        keep.extend(idx);
    }
    keep.sort_unstable();
    keep
}

/// Runs the full benchmark evaluation.
pub fn evaluate(
    preds: &[Prediction],
    gt: &GroundTruth,
    vocab: &Vocabulary,
    cfg: &EvalConfig,
) -> Result<EvalReport> {
    cfg.validate()?;
    let videos: HashMap<&str, &VideoMeta> = gt.videos.iter().map(|v| (v.id.as_str(), v)).collect();
    let known: HashSet<u64> = vocab.ids().iter().copied().collect();

    for (k, g) in gt.instances.iter().enumerate() {
        let video = videos.get(g.video_id.as_str()).ok_or_else(|| {
            Error::Validation(format!(
                "annotation {k} references unknown video {:?}",
                g.video_id
            ))
        })?;
        if !known.contains(&g.category_id) {
            return Err(Error::Validation(format!(
                "annotation {k} has category {} missing from the vocabulary",
                g.category_id
            )));
        }
        check_masks(&format!("annotation {k}"), &g.masks, video)?;
    }
    for (k, p) in preds.iter().enumerate() {
        let video = videos.get(p.video_id.as_str()).ok_or_else(|| {
            Error::Validation(format!(
                "prediction {k} references unknown video {:?}",
                p.video_id
            ))
        })?;
        if !known.contains(&p.category_id) {
            return Err(Error::Validation(format!(
                "prediction {k} has unknown category id {}",
                p.category_id
            )));
        }
        if !(0.0..=1.0).contains(&p.score) {
            return Err(Error::Validation(format!(
                "prediction {k} score {} outside [0, 1]",
                p.score
            )));
        }
        check_masks(&format!("prediction {k}"), &p.masks, video)?;
    }

    let kept = cap_per_video(preds, cfg.max_dets_per_video);

    let results: Vec<CategoryResult> = (0..vocab.len())
        .into_par_iter()
        .map(|c| {
            let id = vocab.ids()[c];
            let mut cat_preds: Vec<(usize, &Prediction)> = kept
                .iter()
                .map(|&i| (i, &preds[i]))
                .filter(|(_, p)| p.category_id == id)
                .collect();
            cat_preds.sort_by(|a, b| b.1.score.total_cmp(&a.1.score).then(a.0.cmp(&b.0)));
            let cat_preds: Vec<&Prediction> = cat_preds.into_iter().map(|(_, p)| p).collect();
            let cat_gts: Vec<&GtInstance> = gt
                .instances
                .iter()
                .filter(|g| g.category_id == id)
                .collect();

            let ious = iou_table(&cat_preds, &cat_gts)?;
            let mut matched = Vec::with_capacity(cfg.iou_thresholds.len());
            let mut aps = Vec::with_capacity(cfg.iou_thresholds.len());
            for &threshold in &cfg.iou_thresholds {
                let flags = greedy_match(&ious, cat_gts.len(), threshold);
                matched.push(flags.iter().filter(|&&f| f).count());
                aps.push(average_precision_with(
                    &flags,
                    cat_gts.len(),
                    cfg.recall_points,
                    cfg.ap_mode,
                ));
            }
            let ap = if cat_gts.is_empty() {
                None
            } else {
                Some(aps.iter().flatten().sum::<f64>() / aps.len() as f64)
            };
            Ok(CategoryResult {
                id,
                name: vocab.names()[c].clone(),
                base: vocab.is_base()[c],
                ap,
                n_gt: cat_gts.len(),
                n_pred: cat_preds.len(),
                matched,
            })
        })
        .collect::<Result<_>>()?;

    let map = mean_defined(results.iter().map(|r| &r.ap));
    let map_base = mean_defined(results.iter().filter(|r| r.base).map(|r| &r.ap));
    let map_novel = mean_defined(results.iter().filter(|r| !r.base).map(|r| &r.ap));
    Ok(EvalReport {
        map,
        map_base,
        map_novel,
        iou_thresholds: cfg.iou_thresholds.clone(),
        per_category: results.into_iter().map(|r| (r.name.clone(), r)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn rect(rows: std::ops::Range<u32>, cols: std::ops::Range<u32>) -> Option<RleMask> {
        Some(RleMask::from_rect(10, 10, rows, cols).unwrap())
    }

    fn vocab2() -> Vocabulary {
        Vocabulary::new(
            vec![1, 2],
            vec!["a".into(), "b".into()],
            array![[1.0, 0.0], [0.0, 1.0]],
            vec![true, false],
            "",
        )
        .unwrap()
    }

    fn gt_with(instances: Vec<GtInstance>) -> GroundTruth {
        GroundTruth {
            videos: vec![VideoMeta {
                id: "v".into(),
                height: 10,
                width: 10,
                frame_count: 2,
            }],
            categories: vec![],
            instances,
        }
    }

    fn pred(cat: u64, score: f64, masks: Vec<Option<RleMask>>) -> Prediction {
        Prediction {
            video_id: "v".into(),
            track_id: None,
            category_id: cat,
            score,
            masks,
        }
    }

    #[test]
    fn st_iou_examples() {
        let seq = vec![rect(0..2, 0..2), None];
        assert_eq!(st_iou(&seq, &seq).unwrap(), 1.0);
        assert_eq!(
            st_iou(&[None, rect(0..2, 0..2)], &[rect(0..2, 0..2), None]).unwrap(),
            0.0
        );
        let p = vec![rect(0..2, 0..2), rect(0..2, 0..2)];
        let g = vec![rect(0..2, 0..2), None];
        assert_eq!(st_iou(&p, &g).unwrap(), 0.5);
        assert_eq!(st_iou(&[None], &[None]).unwrap(), 0.0);
        // a shorter prediction still pays for the ground truth it omits
        assert_eq!(
            st_iou(&p[..1], &[rect(0..2, 0..2), rect(0..2, 0..2)]).unwrap(),
            0.5
        );
        let other = vec![Some(RleMask::empty(4, 4).unwrap())];
        assert!(matches!(st_iou(&other, &g), Err(Error::Dimension(_))));
    }

    #[test]
    fn match_examples() {
        let g = GtInstance {
            video_id: "v".into(),
            category_id: 1,
            masks: vec![rect(0..10, 0..10)],
        };
        let same = pred(1, 0.9, g.masks.clone());
        assert_eq!(match_category(&[&same], &[&g], 0.5).unwrap(), vec![true]);
        // 30 of 100 pixels
        let weak = pred(1, 0.9, vec![rect(0..3, 0..10)]);
        assert_eq!(match_category(&[&weak], &[&g], 0.5).unwrap(), vec![false]);
        // IoU 0.8 at confidence 0.9 comes first and takes the instance
        let high = pred(1, 0.9, vec![rect(0..8, 0..10)]);
        let low = pred(1, 0.6, vec![rect(0..9, 0..10)]);
        assert_eq!(
            match_category(&[&high, &low], &[&g], 0.5).unwrap(),
            vec![true, false]
        );
    }

    #[test]
    fn matching_is_video_local() {
        let g = GtInstance {
            video_id: "w".into(),
            category_id: 1,
            masks: vec![rect(0..10, 0..10)],
        };
        let p = pred(1, 0.9, g.masks.clone());
        assert_eq!(match_category(&[&p], &[&g], 0.5).unwrap(), vec![false]);
    }

    #[test]
    fn ap_examples() {
        assert_eq!(average_precision(&[true], 1, 101), Some(1.0));
        assert_eq!(average_precision(&[false, true], 1, 101), Some(0.5));
        let ap = average_precision(&[true], 2, 101).unwrap();
        assert!((ap - 51.0 / 101.0).abs() < 1e-12);
        assert_eq!(average_precision(&[], 3, 101), Some(0.0));
        assert_eq!(average_precision(&[true], 0, 101), None);
    }

    #[test]
    fn trapezoid_mode() {
        let ap = average_precision_with(&[true], 1, 101, ApMode::Trapezoid).unwrap();
        assert_eq!(ap, 1.0);
        let ap = average_precision_with(&[true, false, true], 2, 101, ApMode::Trapezoid).unwrap();
        // envelope [1, 2/3, 2/3] at recalls [0.5, 0.5, 1]
        assert!((ap - (0.5 + 0.5 * 2.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn perfect_predictions() {
        let ga = GtInstance {
            video_id: "v".into(),
            category_id: 1,
            masks: vec![rect(0..4, 0..4), None],
        };
        let gb = GtInstance {
            video_id: "v".into(),
            category_id: 2,
            masks: vec![rect(5..9, 5..9), rect(5..9, 5..9)],
        };
        let preds = vec![
            pred(1, 1.0, ga.masks.clone()),
            pred(2, 1.0, gb.masks.clone()),
        ];
        let r = evaluate(
            &preds,
            &gt_with(vec![ga, gb]),
            &vocab2(),
            &EvalConfig::default(),
        )
        .unwrap();
        assert_eq!(r.map, Some(1.0));
        assert_eq!(r.map_base, Some(1.0));
        assert_eq!(r.map_novel, Some(1.0));
    }

    #[test]
    fn iou_072_scores_half() {
        // 72 of 100 pixels
        let g = GtInstance {
            video_id: "v".into(),
            category_id: 1,
            masks: vec![rect(0..10, 0..10)],
        };
        let p = pred(
            1,
            0.8,
            vec![Some(RleMask::new(10, 10, vec![0, 72, 28]).unwrap())],
        );
        assert_eq!(st_iou(&p.masks, &g.masks).unwrap(), 0.72);
        let r = evaluate(&[p], &gt_with(vec![g]), &vocab2(), &EvalConfig::default()).unwrap();
        assert!((r.ap_of("a").unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(
            r.per_category["a"].matched,
            vec![1, 1, 1, 1, 1, 0, 0, 0, 0, 0]
        );
        assert_eq!(r.ap_of("b"), None);
        assert_eq!(r.map_novel, None);
    }

    #[test]
    fn wrong_category_does_not_match() {
        let g = GtInstance {
            video_id: "v".into(),
            category_id: 1,
            masks: vec![rect(0..4, 0..4)],
        };
        let p = pred(2, 1.0, g.masks.clone());
        let r = evaluate(&[p], &gt_with(vec![g]), &vocab2(), &EvalConfig::default()).unwrap();
        assert_eq!(r.ap_of("a"), Some(0.0));
        assert_eq!(r.per_category["b"].ap, None);
        assert_eq!(r.map, Some(0.0));
    }

    #[test]
    fn validation_errors() {
        let g = GtInstance {
            video_id: "v".into(),
            category_id: 1,
            masks: vec![rect(0..4, 0..4)],
        };
        let gt = gt_with(vec![g.clone()]);
        let bad_cat = pred(9, 1.0, g.masks.clone());
        assert!(matches!(
            evaluate(&[bad_cat], &gt, &vocab2(), &EvalConfig::default()),
            Err(Error::Validation(_))
        ));
        let mut bad_video = pred(1, 1.0, g.masks.clone());
        bad_video.video_id = "nope".into();
        assert!(matches!(
            evaluate(&[bad_video], &gt, &vocab2(), &EvalConfig::default()),
            Err(Error::Validation(_))
        ));
        let cfg = EvalConfig {
            iou_thresholds: vec![0.7, 0.5],
            ..Default::default()
        };
        assert!(evaluate(&[], &gt, &vocab2(), &cfg).is_err());
    }

    #[test]
    fn max_dets_keeps_most_confident() {
        let g = GtInstance {
            video_id: "v".into(),
            category_id: 1,
            masks: vec![rect(0..4, 0..4)],
        };
        let preds = vec![
            pred(1, 0.2, g.masks.clone()),
            pred(1, 0.9, vec![rect(6..9, 6..9)]),
        ];
        let cfg = EvalConfig {
            max_dets_per_video: 1,
            ..Default::default()
        };
        let r = evaluate(&preds, &gt_with(vec![g.clone()]), &vocab2(), &cfg).unwrap();
        assert_eq!(r.ap_of("a"), Some(0.0));
        assert_eq!(r.per_category["a"].n_pred, 1);
        let r = evaluate(&preds, &gt_with(vec![g]), &vocab2(), &EvalConfig::default()).unwrap();
        assert_eq!(r.ap_of("a"), Some(0.5));
    }

    #[test]
    fn table_lists_every_category() {
        let g = GtInstance {
            video_id: "v".into(),
            category_id: 1,
            masks: vec![rect(0..4, 0..4)],
        };
        let r = evaluate(&[], &gt_with(vec![g]), &vocab2(), &EvalConfig::default()).unwrap();
        let table = r.to_table();
        assert!(table.contains("novel"));
        assert!(table
            .lines()
            .any(|l| l.starts_with("mAP_n") && l.trim_end().ends_with('-')));
    }
}
