//! Brute-force reference implementations.
//!
//! Nothing here calls into `assignment`, `evaluator` or the RLE arithmetic of
//! `mask`; masks are expanded from their raw run lengths and every quantity is
//! recomputed on dense pixel grids.

use std::collections::{BTreeMap, HashMap};

use crate::assignment::WeightMatrix;
use crate::classifier::Vocabulary;
use crate::error::{Error, Result};
use crate::evaluator::{ApMode, CategoryResult, EvalConfig, EvalReport, GroundTruth, Prediction};
use crate::mask::RleMask;

/// Largest `min(rows, cols)` the enumeration accepts.
pub const MAX_BRUTE_FORCE: usize = 8;

/// Largest `height * width * frames` per video the dense evaluator accepts.
pub const MAX_DENSE_PIXELS: u64 = 10_000_000;

/// Enumerates every injection of the smaller side into the larger one and
/// returns the best total (summed in row order) with one optimal assignment.
pub fn brute_force_assignment(w: &WeightMatrix) -> Result<(f64, Vec<(usize, usize)>)> {
    let (rows, cols) = (w.rows(), w.cols());
    if rows.min(cols) > MAX_BRUTE_FORCE {
        return Err(Error::OracleSize(format!(
            "{rows}x{cols} matrix exceeds the {MAX_BRUTE_FORCE}-element enumeration limit"
        )));
    }
    if rows == 0 || cols == 0 {
        return Ok((0.0, Vec::new()));
    }
    let transpose = rows > cols;
    let (small, large) = if transpose {
        (cols, rows)
    } else {
        (rows, cols)
    };

    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut chosen = Vec::with_capacity(small);
    let mut used = vec![false; large];
    enumerate(small, large, &mut chosen, &mut used, &mut |pick| {
        let mut pairs: Vec<(usize, usize)> = pick
            .iter()
            .enumerate()
            .map(|(s, &l)| if transpose { (l, s) } else { (s, l) })
            .collect();
        pairs.sort_unstable();
        let total: f64 = pairs.iter().map(|&(r, c)| w.get(r, c)).sum();
        if best.as_ref().is_none_or(|(b, _)| total > *b) {
            best = Some((total, pick.to_vec()));
        }
    });
    let (total, pick) = best.expect("at least one injection exists");
    let mut pairs: Vec<(usize, usize)> = pick
        .iter()
        .enumerate()
        .map(|(s, &l)| if transpose { (l, s) } else { (s, l) })
        .collect();
    pairs.sort_unstable();
    Ok((total, pairs))
}

fn enumerate(
    small: usize,
    large: usize,
    chosen: &mut Vec<usize>,
    used: &mut [bool],
    visit: &mut dyn FnMut(&[usize]),
) {
    if chosen.len() == small {
        visit(chosen);
        return;
    }
    for l in 0..large {
        if used[l] {
            continue;
        }
        used[l] = true;
        chosen.push(l);
        enumerate(small, large, chosen, used, visit);
        chosen.pop();
        used[l] = false;
    }
}

/// Column-major 0/1 pixels straight from the run lengths.
fn expand(mask: &RleMask) -> Vec<u8> {
    let mut out = Vec::new();
    let mut value = 0u8;
    for &run in mask.counts() {
        for _ in 0..run {
            out.push(value);
        }
        value = 1 - value;
    }
    out
}

type DenseSeq = Vec<Option<Vec<u8>>>;

fn densify(masks: &[Option<RleMask>], frames: usize, pixels: usize) -> Result<DenseSeq> {
    let mut out = Vec::with_capacity(frames);
    for t in 0..frames {
        match masks.get(t).and_then(Option::as_ref) {
            Some(m) => {
                let dense = expand(m);
                if dense.len() != pixels {
                    return Err(Error::Dimension(format!(
                        "frame {t}: mask has {} pixels, video has {pixels}",
                        dense.len()
                    )));
                }
                out.push(Some(dense));
            }
            None => out.push(None),
        }
    }
    Ok(out)
}

fn dense_iou(a: &DenseSeq, b: &DenseSeq) -> f64 {
    let mut inter = 0u64;
    let mut union = 0u64;
    for (fa, fb) in a.iter().zip(b) {
        match (fa, fb) {
            (Some(x), Some(y)) => {
                for (&p, &q) in x.iter().zip(y) {
                    if p == 1 && q == 1 {
                        inter += 1;
                    }
                    if p == 1 || q == 1 {
                        union += 1;
                    }
                }
            }
            (Some(x), None) | (None, Some(x)) => {
                union += x.iter().filter(|&&p| p == 1).count() as u64;
            }
            (None, None) => {}
        }
    }
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

fn reference_ap(flags: &[bool], n_gt: usize, cfg: &EvalConfig) -> f64 {
    let mut points = Vec::new();
    let mut tp = 0usize;
    for (k, &f) in flags.iter().enumerate() {
        if f {
            tp += 1;
        }
        points.push((tp as f64 / n_gt as f64, tp as f64 / (k + 1) as f64));
    }
    // best precision at any operating point with recall >= r
    let best_at = |r: f64| {
        points
            .iter()
            .filter(|(rec, _)| *rec >= r)
            .map(|&(_, p)| p)
            .fold(0.0f64, f64::max)
    };
    match cfg.ap_mode {
        ApMode::Interpolated => {
            let n = cfg.recall_points;
            let mut sum = 0.0;
            for k in 0..n {
                sum += best_at(k as f64 / (n - 1) as f64);
            }
            sum / n as f64
        }
        ApMode::Trapezoid => {
            let best_from = |k: usize| points[k..].iter().map(|&(_, p)| p).fold(0.0f64, f64::max);
            let mut area = 0.0;
            let mut prev = (0.0, if points.is_empty() { 0.0 } else { best_from(0) });
            for (k, &(r, _)) in points.iter().enumerate() {
                let p = best_from(k);
                area += (r - prev.0) * (p + prev.1) / 2.0;
                prev = (r, p);
            }
            area
        }
    }
}

/// Evaluates on fully decoded masks with straight-line code.
pub fn dense_reference_eval(
    preds: &[Prediction],
    gt: &GroundTruth,
    vocab: &Vocabulary,
    cfg: &EvalConfig,
) -> Result<EvalReport> {
    cfg.validate()?;
    let mut video_shape = HashMap::new();
    for v in &gt.videos {
        let pixels = v.height as u64 * v.width as u64;
        if pixels * v.frame_count as u64 > MAX_DENSE_PIXELS {
            return Err(Error::OracleSize(format!(
                "video {:?} has {} pixels over all frames",
                v.id,
                pixels * v.frame_count as u64
            )));
        }
        video_shape.insert(v.id.clone(), (v.frame_count, pixels as usize));
    }
    let category_known = |id: u64| vocab.ids().contains(&id);

    let mut gt_dense = Vec::new();
    for (k, g) in gt.instances.iter().enumerate() {
        let &(frames, pixels) = video_shape
            .get(&g.video_id)
            .ok_or_else(|| Error::Validation(format!("annotation {k}: unknown video")))?;
        if !category_known(g.category_id) {
            return Err(Error::Validation(format!(
                "annotation {k}: unknown category"
            )));
        }
        gt_dense.push(densify(&g.masks, frames, pixels)?);
    }

    // most confident max_dets per video, ties by input position
    let mut keep = vec![false; preds.len()];
    let mut per_video: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, p) in preds.iter().enumerate() {
        if !video_shape.contains_key(&p.video_id) {
            return Err(Error::Validation(format!("prediction {i}: unknown video")));
        }
        if !category_known(p.category_id) {
            return Err(Error::Validation(format!(
                "prediction {i}: unknown category"
            )));
        }
        per_video.entry(p.video_id.as_str()).or_default().push(i);
    }
    for (_, mut list) in per_video {
        list.sort_by(|&a, &b| {
            preds[b]
                .score
                .partial_cmp(&preds[a].score)
                .unwrap()
                .then(a.cmp(&b))
        });
        for &i in list.iter().take(cfg.max_dets_per_video) {
            keep[i] = true;
        }
    }

    let mut per_category = BTreeMap::new();
    let mut all = Vec::new();
    let mut base = Vec::new();
    let mut novel = Vec::new();
    for c in 0..vocab.len() {
        let id = vocab.ids()[c];
        let mut order: Vec<usize> = (0..preds.len())
            .filter(|&i| keep[i] && preds[i].category_id == id)
            .collect();
        order.sort_by(|&a, &b| {
            preds[b]
                .score
                .partial_cmp(&preds[a].score)
                .unwrap()
                .then(a.cmp(&b))
        });
        let gts: Vec<usize> = (0..gt.instances.len())
            .filter(|&g| gt.instances[g].category_id == id)
            .collect();

        let mut ious = vec![vec![None; gts.len()]; order.len()];
        for (pi, &p) in order.iter().enumerate() {
            let (frames, pixels) = video_shape[&preds[p].video_id];
            let dense = densify(&preds[p].masks, frames, pixels)?;
            for (gi, &g) in gts.iter().enumerate() {
                if gt.instances[g].video_id == preds[p].video_id {
                    ious[pi][gi] = Some(dense_iou(&dense, &gt_dense[g]));
                }
            }
        }

        let mut matched = Vec::new();
        let mut ap_sum = 0.0;
        for &thr in &cfg.iou_thresholds {
            let mut gt_used = vec![false; gts.len()];
            let mut flags = Vec::new();
            for row in &ious {
                let mut pick: Option<usize> = None;
                for gi in 0..gts.len() {
                    if gt_used[gi] {
                        continue;
                    }
                    if let Some(iou) = row[gi] {
                        if iou >= thr && pick.is_none_or(|b| iou > row[b].unwrap()) {
                            pick = Some(gi);
                        }
                    }
                }
                if let Some(gi) = pick {
                    gt_used[gi] = true;
                }
                flags.push(pick.is_some());
            }
            matched.push(flags.iter().filter(|&&f| f).count());
            if !gts.is_empty() {
                ap_sum += reference_ap(&flags, gts.len(), cfg);
            }
        }
        let ap = (!gts.is_empty()).then(|| ap_sum / cfg.iou_thresholds.len() as f64);
        if let Some(ap) = ap {
            all.push(ap);
            if vocab.is_base()[c] {
                base.push(ap);
            } else {
                novel.push(ap);
            }
        }
        per_category.insert(
            vocab.names()[c].clone(),
            CategoryResult {
                id,
                name: vocab.names()[c].clone(),
                base: vocab.is_base()[c],
                ap,
                n_gt: gts.len(),
                n_pred: order.len(),
                matched,
            },
        );
    }
    let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
    Ok(EvalReport {
        map: mean(&all),
        map_base: mean(&base),
        map_novel: mean(&novel),
        iou_thresholds: cfg.iou_thresholds.clone(),
        per_category,
    })
}
