//! Video mAP from hand-built predictions.
//!
//!     cargo run -p memtrack --example evaluate

use ndarray::array;

use memtrack::classifier::Vocabulary;
use memtrack::evaluator::{
    evaluate, st_iou, CategoryMeta, EvalConfig, GroundTruth, GtInstance, Prediction, VideoMeta,
};
use memtrack::mask::RleMask;

fn rect(rows: std::ops::Range<u32>, cols: std::ops::Range<u32>) -> Option<RleMask> {
    Some(RleMask::from_rect(20, 20, rows, cols).expect("inside the canvas"))
}

fn main() -> memtrack::Result<()> {
    let vocab = Vocabulary::new(
        vec![1, 2],
        vec!["cat".into(), "okapi".into()],
        array![[1.0, 0.0], [0.0, 1.0]],
        vec![true, false],
        "a photo of [X]",
    )?;
    let gt = GroundTruth {
        videos: vec![VideoMeta {
            id: "clip".into(),
            height: 20,
            width: 20,
            frame_count: 2,
        }],
        categories: vec![
            CategoryMeta {
                id: 1,
                name: "cat".into(),
            },
            CategoryMeta {
                id: 2,
                name: "okapi".into(),
            },
        ],
        instances: vec![
            GtInstance {
                video_id: "clip".into(),
                category_id: 1,
                masks: vec![rect(0..10, 0..10), rect(1..11, 0..10)],
            },
            GtInstance {
                video_id: "clip".into(),
                category_id: 2,
                masks: vec![rect(12..20, 12..20), None],
            },
        ],
    };
    let preds = vec![
        Prediction {
            video_id: "clip".into(),
            track_id: Some(0),
            category_id: 1,
            score: 0.9,
            masks: vec![rect(0..10, 0..10), rect(0..10, 0..10)],
        },
        Prediction {
            video_id: "clip".into(),
            track_id: Some(1),
            category_id: 2,
            score: 0.8,
            masks: vec![rect(12..20, 13..20), None],
        },
    ];
    let tube = st_iou(&preds[0].masks, &gt.instances[0].masks)?;
    println!("spatio-temporal IoU of the cat track: {tube:.4}");

    let report = evaluate(&preds, &gt, &vocab, &EvalConfig::default())?;
    print!("{}", report.to_table());
    Ok(())
}
