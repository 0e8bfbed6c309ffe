//! Memory-query tracking and open-vocabulary evaluation for video instance
//! segmentation.
//!
//! The crate consumes per-frame object proposals (query embeddings, object
//! scores and run-length-encoded masks) together with precomputed category
//! text embeddings, and provides:
//!
//! - [`mask`]: column-major RLE masks and run-merging pixel arithmetic.
//! - [`assignment`]: an exact Kuhn-Munkres solver with a maximisation interface.
//! - [`tracker`]: a fixed bank of memory queries, associated to each frame by
//!   optimal assignment and refreshed with an object-score gated momentum update.
//! - [`classifier`]: class-head forward pass and temperature-scaled cosine
//!   scoring against text embeddings, plus per-frame score averaging.
//! - [`evaluator`]: spatio-temporal IoU, per-category AP over IoU thresholds
//!   and mAP split into base and novel categories.
//! - [`dataio`]: the `memtrack/1` JSON file formats.
//! - [`synth`]: seeded synthetic fixtures and brute-force reference oracles.
//! - [`pipeline`]: tracking, classification and export over whole videos.
//! - [`cli`]: the `memtrack` command-line driver.
//!
//! Runnable walkthroughs for each capability live in the crate's `examples/`
//! directory (`cargo run -p memtrack --example <name>`).

pub mod assignment;
pub mod classifier;
pub mod cli;
pub mod dataio;
pub mod error;
pub mod evaluator;
pub mod mask;
pub mod pipeline;
pub mod synth;
pub mod tracker;

pub use error::{Error, Result};
