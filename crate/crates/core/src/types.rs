use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// Target sampling rate of the whole pipeline, Hz.
pub const TARGET_FS: f64 = 250.0;

/// Segment length in seconds.
pub const SEGMENT_SECONDS: f64 = 8.0;

/// Samples per segment at the target rate.
pub const SEGMENT_LEN: usize = 2000;

/// Source database of a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Db {
    Cudb,
    Vfdb,
    /// Synthetic or otherwise unrecognized corpus directory.
    Other,
}

impl Db {
    /// Infer the database from a directory name, case-insensitively.
    pub fn from_dir_name(name: &str) -> Db {
        match name.to_ascii_lowercase().as_str() {
            "cudb" => Db::Cudb,
            "vfdb" => Db::Vfdb,
            _ => Db::Other,
        }
    }
}

/// Binary rhythm class of a segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SegmentLabel {
    /// Shockable: ventricular fibrillation / ventricular tachycardia.
    Sh,
    /// Non-shockable: everything else retained by the label map.
    Nsh,
}

impl SegmentLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            SegmentLabel::Sh => "SH",
            SegmentLabel::Nsh => "NSH",
        }
    }

    pub fn parse(s: &str) -> Option<SegmentLabel> {
        match s {
            "SH" | "sh" => Some(SegmentLabel::Sh),
            "NSH" | "nsh" => Some(SegmentLabel::Nsh),
            _ => None,
        }
    }

    /// SH is the positive class throughout the pipeline.
    pub fn is_positive(&self) -> bool {
        matches!(self, SegmentLabel::Sh)
    }
}

impl fmt::Display for SegmentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What the label map assigns to a rhythm annotation string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelClass {
    Sh,
    Nsh,
    /// Window dropped from the corpus (noise, asystole, ...).
    Discard,
}

/// One ECG record: a single channel in physical units plus its rhythm
/// annotation stream.
#[derive(Debug, Clone, PartialEq)]
pub struct EcgRecord {
    pub record_id: String,
    pub db: Db,
    /// Channel-0 samples in millivolts.
    pub samples: Vec<f64>,
    /// Native sampling rate, Hz.
    pub fs_native: f64,
    /// (sample_index, rhythm string), strictly increasing indices.
    pub annotations: Vec<(usize, String)>,
}

impl EcgRecord {
    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.fs_native
    }
}

/// One 8-second, 250 Hz window with its class label and provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcgSegment {
    pub record_id: String,
    /// Start sample at 250 Hz within the resampled record.
    pub start_index: usize,
    pub samples: Vec<f64>,
    pub label: SegmentLabel,
}

/// The three analysis signals of one segment: the preprocessed ECG plus the
/// shockable-band and non-shockable-band reconstructions from the mode
/// decomposition. By construction `ecg = sh + nsh + dc mode + residual`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriSignal {
    pub ecg: Vec<f64>,
    pub sh: Vec<f64>,
    pub nsh: Vec<f64>,
}

/// Record-level train/test split.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub train_record_ids: BTreeSet<String>,
    pub test_record_ids: BTreeSet<String>,
    pub seed: u64,
}

impl SplitManifest {
    pub fn is_train(&self, record_id: &str) -> bool {
        self.train_record_ids.contains(record_id)
    }
}

/// Feature matrix + labels + grouping key, row per segment.
///
/// `features` is row-major with `n_features` columns; row `i` describes the
/// segment with `labels[i]` and `record_ids[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub features: Vec<f64>,
    pub n_features: usize,
    pub labels: Vec<SegmentLabel>,
    pub record_ids: Vec<String>,
    pub feature_names: Vec<String>,
}

impl Dataset {
    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    /// Copy the given feature columns of the given rows into a fresh
    /// row-major matrix.
    pub fn gather(&self, rows: &[usize], cols: &[usize]) -> Vec<f64> {
        let mut out = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            let row = self.row(r);
            out.extend(cols.iter().map(|&c| row[c]));
        }
        out
    }

    /// Consistency check: every vector agrees on the row count and the
    /// feature-name list matches the column count.
    pub fn validate(&self) -> crate::Result<()> {
        let n = self.labels.len();
        if self.record_ids.len() != n {
            return Err(crate::Error::ShapeMismatch {
                op: "Dataset::validate record_ids",
                expected: n,
                got: self.record_ids.len(),
            });
        }
        if self.features.len() != n * self.n_features {
            return Err(crate::Error::ShapeMismatch {
                op: "Dataset::validate features",
                expected: n * self.n_features,
                got: self.features.len(),
            });
        }
        if self.feature_names.len() != self.n_features {
            return Err(crate::Error::ShapeMismatch {
                op: "Dataset::validate feature_names",
                expected: self.n_features,
                got: self.feature_names.len(),
            });
        }
        Ok(())
    }
}
