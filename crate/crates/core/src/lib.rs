//! Shockable-rhythm detection from single-lead ECG.
//!
//! The pipeline: WFDB ingest → 250 Hz / 8 s segments → filter chain →
//! variational mode decomposition into SH/NSH component signals → 93-entry
//! feature vectors → KNN with sequential forward feature selection →
//! repeated cross-validated evaluation. Everything downstream of ingest is
//! deterministic in the master seed.

pub mod cv;
pub mod error;
pub mod eval;
pub mod features;
pub mod ingest;
pub mod knn;
pub mod pipeline;
pub mod preprocess;
pub mod rng;
pub mod selection;
pub mod spectrum;
pub mod synthetic;
pub mod types;
pub mod vmd;
pub mod wfdb;

pub use error::{Error, Result};
pub use types::{
    Dataset, Db, EcgRecord, EcgSegment, LabelClass, SegmentLabel, SplitManifest, SEGMENT_LEN,
    SEGMENT_SECONDS, TARGET_FS,
};
