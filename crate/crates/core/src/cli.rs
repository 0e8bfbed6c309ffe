//! The `memtrack` command-line driver.
//!
//! Every subcommand prints exactly one JSON summary line on standard output;
//! diagnostics go to standard error. Exit codes: 0 success, 1 rejected input,
//! 2 I/O failure, 3 internal invariant failure.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::classifier::{Confidence, TemperatureMode};
use crate::dataio::{self, FileKind, RunSettings};
use crate::error::{Error, Result};
use crate::evaluator::{ApMode, EvalReport};
use crate::pipeline::{ClassifyMode, Pipeline};
use crate::synth::{generate_fixture, load_fixture_spec};
use crate::tracker::Similarity;

#[derive(Debug, Parser)]
#[command(
    name = "memtrack",
    version,
    about = "Memory-query video instance tracking and evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    opts: GlobalOpts,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Settings file (`memtrack/1` run config); flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads for per-video and per-category parallelism.
    #[arg(long, global = true, env = "MEMTRACK_JOBS")]
    jobs: Option<usize>,

    /// Momentum factor of the memory update.
    #[arg(long, global = true)]
    alpha: Option<f64>,

    #[arg(long, global = true, value_enum)]
    similarity: Option<SimilarityArg>,

    /// Update every slot with weight alpha regardless of object score.
    #[arg(long, global = true)]
    no_gate: bool,

    /// Cosine temperature.
    #[arg(long, global = true)]
    temperature: Option<f64>,

    #[arg(long, global = true, value_enum)]
    temperature_mode: Option<TemperatureModeArg>,

    #[arg(long, global = true)]
    max_dets: Option<usize>,

    /// `start:step:stop` or a comma-separated list.
    #[arg(long, global = true, value_parser = parse_thresholds)]
    iou_thresholds: Option<Thresholds>,

    #[arg(long, global = true)]
    recall_points: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic fixture described by a spec file.
    GenFixture {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Track and classify proposal files, writing predictions.
    Track {
        #[arg(long, num_args = 1.., required = true)]
        proposals: Vec<PathBuf>,
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long)]
        head: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        track: TrackOpts,
    },
    /// Score predictions against ground truth.
    Evaluate {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        vocab: PathBuf,
        /// Write the full report here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print a per-category table on standard error.
        #[arg(long)]
        table: bool,
    },
    /// Generate a fixture, track it and evaluate the result.
    E2e {
        #[arg(long)]
        spec: PathBuf,
        /// Keep all intermediate files here instead of a temporary directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        track: TrackOpts,
    },
    /// Schema-check any `memtrack/1` file.
    Validate {
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Debug, Args)]
struct TrackOpts {
    #[arg(long, value_enum)]
    classify: Option<ClassifyArg>,
    /// Categories exported per tracklet.
    #[arg(long)]
    top_k: Option<usize>,
    /// Minimum exported confidence (exclusive).
    #[arg(long)]
    export_threshold: Option<f64>,
    #[arg(long, value_enum)]
    confidence: Option<ConfidenceArg>,
    #[arg(long)]
    ap_mode: Option<ApModeArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SimilarityArg {
    Inner,
    Cosine,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TemperatureModeArg {
    Multiply,
    Divide,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ClassifyArg {
    Memory,
    Average,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConfidenceArg {
    ClassScore,
    ClassTimesObject,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ApModeArg {
    Interpolated,
    Trapezoid,
}

#[derive(Debug, Clone, PartialEq)]
struct Thresholds(Vec<f64>);

fn parse_thresholds(s: &str) -> std::result::Result<Thresholds, String> {
    threshold_list(s).map(Thresholds)
}

fn threshold_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|e| format!("{t:?} is not a number: {e}"))
    };
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, step, stop] => {
            let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
            if step.is_nan() || step <= 0.0 || stop < start {
                return Err(format!("{s:?} is not an increasing range"));
            }
            // fixed-point steps keep 0.50:0.05:0.95 identical to the defaults
            const SCALE: f64 = 1e6;
            let (a, b) = ((start * SCALE).round(), (step * SCALE).round());
            let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..n).map(|k| (a + k as f64 * b) / SCALE).collect())
        }
        [_] => s.split(',').map(num).collect(),
        _ => Err(format!("{s:?}: expected start:step:stop or a list")),
    }
}

impl GlobalOpts {
    fn settings(&self) -> Result<RunSettings> {
        let mut s = match &self.config {
            Some(path) => dataio::load_run_settings(path)?,
            None => RunSettings::default(),
        };
        if let Some(a) = self.alpha {
            s.tracker.alpha = a;
        }
        if let Some(sim) = self.similarity {
            s.tracker.similarity = match sim {
                SimilarityArg::Inner => Similarity::InnerProduct,
                SimilarityArg::Cosine => Similarity::Cosine,
            };
        }
        if self.no_gate {
            s.tracker.gate_with_object_score = false;
        }
        if let Some(t) = self.temperature {
            s.classifier.temperature = t;
        }
        if let Some(m) = self.temperature_mode {
            s.classifier.temperature_mode = match m {
                TemperatureModeArg::Multiply => TemperatureMode::Multiply,
                TemperatureModeArg::Divide => TemperatureMode::Divide,
            };
        }
        if let Some(m) = self.max_dets {
            s.eval.max_dets_per_video = m;
        }
        if let Some(Thresholds(t)) = &self.iou_thresholds {
            s.eval.iou_thresholds = t.clone();
        }
        if let Some(r) = self.recall_points {
            s.eval.recall_points = r;
        }
        s.tracker.validate()?;
        s.classifier.validate()?;
        s.eval.validate()?;
        Ok(s)
    }
}

impl TrackOpts {
    fn apply(&self, mut settings: RunSettings) -> Pipeline {
        if let Some(k) = self.top_k {
            settings.export.top_k = k;
        }
        if let Some(t) = self.export_threshold {
            settings.export.threshold = t;
        }
        if let Some(c) = self.confidence {
            settings.classifier.confidence = match c {
                ConfidenceArg::ClassScore => Confidence::ClassScore,
                ConfidenceArg::ClassTimesObject => Confidence::ClassTimesObject,
            };
        }
        if let Some(m) = self.ap_mode {
            settings.eval.ap_mode = match m {
                ApModeArg::Interpolated => ApMode::Interpolated,
                ApModeArg::Trapezoid => ApMode::Trapezoid,
            };
        }
        let classify = match self.classify {
            Some(ClassifyArg::Average) => ClassifyMode::Average,
            _ => ClassifyMode::Memory,
        };
        Pipeline::new(settings, classify)
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    command: &'a str,
    #[serde(flatten)]
    body: serde_json::Value,
}

fn emit(command: &str, body: serde_json::Value) -> Result<()> {
    let line = serde_json::to_string(&Summary { command, body })
        .map_err(|e| Error::Format(format!("summary serialization failed: {e}")))?;
    println!("{line}");
    Ok(())
}

fn metrics(report: &EvalReport) -> serde_json::Value {
    serde_json::json!({
        "mAP": report.map,
        "mAP_b": report.map_base,
        "mAP_n": report.map_novel,
        "categories": report.per_category.len(),
    })
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn execute(cli: Cli) -> Result<()> {
    let settings = cli.opts.settings()?;
    match cli.command {
        Command::GenFixture { spec, out } => {
            let spec = load_fixture_spec(&spec)?;
            let fixture = generate_fixture(&spec)?;
            let paths = fixture.write_to(&out)?;
            emit(
                "gen-fixture",
                serde_json::json!({
                    "out": path_str(&out),
                    "videos": fixture.videos.len(),
                    "instances": fixture.ground_truth.instances.len(),
                    "categories": fixture.vocabulary.len(),
                    "files": paths.proposals.len() + 3,
                }),
            )
        }
        Command::Track {
            proposals,
            vocab,
            head,
            out,
            track,
        } => {
            let pipeline = track.apply(settings);
            let vocab = dataio::load_vocabulary(&vocab)?;
            let head = dataio::load_class_head(&head)?;
            let videos = proposals
                .iter()
                .map(dataio::load_proposals)
                .collect::<Result<Vec<_>>>()?;
            let preds = pipeline.predict(&videos, &head, &vocab)?;
            dataio::write_predictions(&out, &preds)?;
            emit(
                "track",
                serde_json::json!({
                    "out": path_str(&out),
                    "videos": videos.len(),
                    "predictions": preds.len(),
                }),
            )
        }
        Command::Evaluate {
            pred,
            gt,
            vocab,
            out,
            table,
        } => {
            let preds = dataio::load_predictions(&pred)?;
            let gt = dataio::load_ground_truth(&gt)?;
            let vocab = dataio::load_vocabulary(&vocab)?;
            let report = crate::evaluator::evaluate(&preds, &gt, &vocab, &settings.eval)?;
            if let Some(out) = &out {
                dataio::save_report(out, &report)?;
            }
            if table {
                eprint!("{}", report.to_table());
            }
            emit("evaluate", metrics(&report))
        }
        Command::E2e { spec, out, track } => {
            let pipeline = track.apply(settings);
            let spec = load_fixture_spec(&spec)?;
            let tmp;
            let dir = match &out {
                Some(d) => d.as_path(),
                None => {
                    tmp = tempfile::tempdir().map_err(|e| Error::io(std::env::temp_dir(), e))?;
                    tmp.path()
                }
            };
            // every stage goes through the files so the run matches the
            // separate gen-fixture, track and evaluate commands
            let paths = generate_fixture(&spec)?.write_to(dir)?;
            let vocab = dataio::load_vocabulary(&paths.vocabulary)?;
            let head = dataio::load_class_head(&paths.class_head)?;
            let videos = paths
                .proposals
                .iter()
                .map(dataio::load_proposals)
                .collect::<Result<Vec<_>>>()?;
            let preds = pipeline.predict(&videos, &head, &vocab)?;
            let pred_path = dir.join("predictions.json");
            dataio::write_predictions(&pred_path, &preds)?;
            let preds = dataio::load_predictions(&pred_path)?;
            let gt = dataio::load_ground_truth(&paths.ground_truth)?;
            let report = pipeline.evaluate(&preds, &gt, &vocab)?;
            dataio::save_report(dir.join("report.json"), &report)?;
            let mut body = metrics(&report);
            body["videos"] = videos.len().into();
            body["predictions"] = preds.len().into();
            emit("e2e", body)
        }
        Command::Validate { file } => {
            let kind: FileKind = dataio::validate_file(&file)?;
            emit(
                "validate",
                serde_json::json!({ "file": path_str(&file), "kind": kind, "valid": true }),
            )
        }
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let jobs = cli.opts.jobs;
    let result = match jobs {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(cli)),
            Err(e) => Err(Error::InvalidInput(format!(
                "cannot start {n} workers: {e}"
            ))),
        },
        Some(_) => Err(Error::InvalidInput("--jobs must be positive".into())),
        None => execute(cli),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("memtrack: {e}");
            e.exit_code()
        }
    }
}
