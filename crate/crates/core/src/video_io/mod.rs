//! On-disk formats: frame directories, instance manifests, evaluation
//! reports. Every writer here is deterministic: the same in-memory value
//! always produces identical bytes.

mod frames;
mod manifest;
pub mod prompts;
mod real;
mod report;

pub use frames::{frame_name, read_frames, write_frames, write_png, FrameSequence};
pub use manifest::{
    parse_manifest, read_manifest, write_manifest, InstanceManifest, SplitTag, TaskBody,
    SCHEMA_VERSION,
};
pub use real::{real_f64, real_points, Real};
pub use report::{
    aggregate_csv, read_report, sig6, write_aggregate, write_report, EvalReport, MAZE_METRICS,
    TANGRAM_METRICS,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum VideoIoError {
    #[error("frame index {0} missing from directory")]
    MissingFrame(usize),
    #[error("frame {index} is {got_w}x{got_h}, expected {want_w}x{want_h}")]
    ShapeMismatch {
        index: usize,
        got_w: u32,
        got_h: u32,
        want_w: u32,
        want_h: u32,
    },
    #[error("no frames found")]
    EmptySequence,
    #[error("unsupported schema_version {0}, expected 1")]
    VersionError(u32),
    #[error("invalid manifest: {0}")]
    InvalidManifest(String),
    #[error("expected a {expected} manifest, got {got}")]
    TaskMismatch {
        expected: &'static str,
        got: String,
    },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("image codec: {0}")]
    Image(#[from] image::ImageError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
