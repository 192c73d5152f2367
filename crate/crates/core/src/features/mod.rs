//! The feature stage: 31 fixed descriptors per signal, evaluated on the
//! original ECG and on the SH/NSH decomposition outputs, giving a
//! 93-dimensional vector per segment.
//!
//! The registry is the single source of truth for feature identity: ids,
//! families, parameters and — critically — order. Column `31·s + k` of the
//! feature matrix is feature `k` of signal `s` (`ecg`, `sh`, `nsh` in that
//! order), and the CSV cache encodes the same layout with prefixed column
//! names. [`REGISTRY_VERSION`] is bumped whenever an id, a formula or the
//! order changes, so stale caches are detected instead of silently reused.
//!
//! Every feature is total: degenerate inputs (flat lines, all-zero
//! decompositions) produce finite fallback values, never NaN.

mod complexity;
mod entropy;
mod spectral;
mod temporal;

use crate::error::{Error, Result};
use crate::spectrum;
use crate::types::{SegmentLabel, TriSignal, TARGET_FS};
use std::io::Write as _;
use std::path::Path;

/// Version tag embedded in `features.csv`; bump on any change to the
/// registry contents, order, or formulas.
pub const REGISTRY_VERSION: &str = "fr-v1";

/// Signal prefixes in canonical order: feature `k` of signal `s` lives at
/// index `31·s + k`.
pub const SIGNAL_PREFIXES: [&str; 3] = ["ecg", "sh", "nsh"];

/// Feature family, mirroring the four groups of the method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Temporal,
    Spectral,
    Complexity,
    Entropy,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Temporal => "temporal",
            Family::Spectral => "spectral",
            Family::Complexity => "complexity",
            Family::Entropy => "entropy",
        }
    }
}

/// One registry entry: a stable id, its family, and the fixed parameters the
/// formula uses (documentation values — the compute functions hard-code them).
pub struct FeatureDef {
    pub id: &'static str,
    pub family: Family,
    pub params: &'static [(&'static str, &'static str)],
    compute: fn(&Ctx) -> f64,
}

macro_rules! def {
    ($id:literal, $family:ident, $fun:path $(, ($k:literal, $v:literal))*) => {
        FeatureDef {
            id: $id,
            family: Family::$family,
            params: &[$(($k, $v)),*],
            compute: $fun,
        }
    };
}

static REGISTRY: [FeatureDef; 31] = [
    // Temporal (9)
    def!("tci", Temporal, temporal::tci, ("window_s", "1"), ("threshold", "0.2*max_abs")),
    def!("tcsc", Temporal, temporal::tcsc, ("window_s", "3"), ("threshold", "0.2")),
    def!("mav", Temporal, temporal::mav, ("window_s", "2")),
    def!("ste", Temporal, temporal::ste, ("tau_s", "3")),
    def!("mea", Temporal, temporal::mea, ("tau_s", "3")),
    def!("bcp", Temporal, temporal::bcp, ("window_s", "0.5"), ("threshold", "0.25*max_abs")),
    def!("count1", Temporal, temporal::count1, ("threshold", "0.5*max_abs")),
    def!("count2", Temporal, temporal::count2, ("threshold", "mean_abs")),
    def!("count3", Temporal, temporal::count3, ("band", "mean_abs..0.5*max_abs")),
    // Spectral (9)
    def!("vf_leak", Spectral, spectral::vf_leak),
    def!("m", Spectral, spectral::m_factor, ("band_hz", "0..min(20F,100)")),
    def!("a2", Spectral, spectral::a2, ("band", "0.7F..1.4F")),
    def!("centroid", Spectral, spectral::centroid, ("band_hz", "0..30")),
    def!("psa", Spectral, spectral::psa, ("band_hz", "4..10")),
    def!("center_power", Spectral, spectral::center_power, ("band_hz", "F-0.5..F+0.5")),
    def!("bwt", Spectral, spectral::bwt, ("band_hz", "0..30")),
    def!("bw", Spectral, spectral::bw, ("mass", "0.5")),
    def!("li", Spectral, spectral::li, ("band_hz", "0.5..30")),
    // Complexity (7)
    def!("psr", Complexity, complexity::psr, ("grid", "40x40"), ("delay_s", "0.5")),
    def!("hilb", Complexity, complexity::hilb, ("grid", "40x40")),
    def!("cm", Complexity, complexity::cm),
    def!("cv_bin", Complexity, complexity::cv_bin, ("threshold", "0.2*max_abs")),
    def!("area", Complexity, complexity::area, ("threshold", "0.2*max_abs")),
    def!("frq", Complexity, complexity::frq, ("threshold", "0.2*max_abs")),
    def!("kurtosis", Complexity, complexity::kurtosis),
    // Entropy (6)
    def!("disp_en", Entropy, entropy::disp_en, ("classes", "6"), ("m", "2")),
    def!("samp_en", Entropy, entropy::samp_en, ("m", "2"), ("r", "0.2*std")),
    def!("energy", Entropy, entropy::energy),
    def!("renyi_en", Entropy, entropy::renyi_en, ("order", "2"), ("bins", "64")),
    def!("fuzzy_en", Entropy, entropy::fuzzy_en, ("m", "2"), ("r", "0.2*std")),
    def!("wavelet_en", Entropy, entropy::wavelet_en, ("levels", "5"), ("wavelet", "haar")),
];

/// The canonical 31-entry feature registry.
pub fn registry() -> &'static [FeatureDef; 31] {
    &REGISTRY
}

/// The 93 canonical column names: each registry id under each signal prefix.
pub fn feature_names() -> Vec<String> {
    let mut names = Vec::with_capacity(3 * REGISTRY.len());
    for prefix in SIGNAL_PREFIXES {
        for def in &REGISTRY {
            names.push(format!("{prefix}_{}", def.id));
        }
    }
    names
}

/// Shared per-signal context so each feature reuses the basic statistics and
/// the windowed spectrum instead of recomputing them.
pub(crate) struct Ctx<'a> {
    pub x: &'a [f64],
    pub fs: f64,
    pub n: usize,
    pub max_abs: f64,
    pub mean: f64,
    pub std: f64,
    /// One-sided amplitude spectrum of the Hamming-windowed signal.
    pub amp: Vec<f64>,
}

impl<'a> Ctx<'a> {
    fn new(x: &'a [f64], fs: f64) -> Self {
        let n = x.len();
        let max_abs = x.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
        let mean = x.iter().sum::<f64>() / n as f64;
        let var = x.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let amp = spectrum::amplitude_spectrum_hamming(x);
        Ctx { x, fs, n, max_abs, mean, std: var.sqrt(), amp }
    }

    /// Frequency of amplitude-spectrum bin `k`.
    pub fn freq(&self, k: usize) -> f64 {
        spectrum::bin_freq(k, self.n, self.fs)
    }
}

/// All 31 features of one signal, in registry order.
pub fn signal_features(x: &[f64], fs: f64) -> Vec<f64> {
    if x.is_empty() {
        return vec![0.0; REGISTRY.len()];
    }
    let ctx = Ctx::new(x, fs);
    REGISTRY.iter().map(|def| (def.compute)(&ctx)).collect()
}

/// One feature by registry id; `None` for an unknown id.
pub fn feature(x: &[f64], fs: f64, id: &str) -> Option<f64> {
    let def = REGISTRY.iter().find(|d| d.id == id)?;
    if x.is_empty() {
        return Some(0.0);
    }
    Some((def.compute)(&Ctx::new(x, fs)))
}

/// The full 93-vector for one segment: ECG block, then SH, then NSH.
pub fn extract_all(tri: &TriSignal) -> Vec<f64> {
    let mut out = Vec::with_capacity(3 * REGISTRY.len());
    for x in [&tri.ecg, &tri.sh, &tri.nsh] {
        out.extend(signal_features(x, TARGET_FS));
    }
    out
}

// ---------------------------------------------------------------------------
// Feature matrix cache (features.csv)
// ---------------------------------------------------------------------------

/// One cached row: segment identity plus its 93 values in registry order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub record_id: String,
    pub start_index: usize,
    pub label: SegmentLabel,
    pub values: Vec<f64>,
}

/// Write the feature matrix as CSV: a registry-version comment line, a header
/// of `record_id,start_index,label` plus the 93 canonical column names, then
/// one row per segment. Floats are written in shortest round-trip form.
pub fn write_features_csv(path: &Path, rows: &[FeatureRow]) -> Result<()> {
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    writeln!(file, "# registry {REGISTRY_VERSION}").map_err(|e| Error::io(path, e))?;
    let mut wtr = csv::Writer::from_writer(file);
    let mut header = vec!["record_id".to_string(), "start_index".into(), "label".into()];
    header.extend(feature_names());
    wtr.write_record(&header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        let mut rec = vec![
            row.record_id.clone(),
            row.start_index.to_string(),
            row.label.as_str().to_string(),
        ];
        rec.extend(row.values.iter().map(|v| format!("{v:?}")));
        wtr.write_record(&rec).map_err(|e| csv_err(path, e))?;
    }
    wtr.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Read a feature matrix back, verifying the header matches the current
/// registry (a renamed or reordered registry shows up as a header mismatch).
pub fn read_features_csv(path: &Path) -> Result<Vec<FeatureRow>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(file);
    let expected: Vec<String> = {
        let mut h = vec!["record_id".to_string(), "start_index".into(), "label".into()];
        h.extend(feature_names());
        h
    };
    let header = rdr.headers().map_err(|e| csv_err(path, e))?;
    if header.len() != expected.len() || header.iter().zip(&expected).any(|(a, b)| a != b) {
        return Err(Error::Artifact {
            path: path.to_path_buf(),
            msg: format!(
                "feature CSV header does not match registry {REGISTRY_VERSION} \
                 ({} columns, expected {})",
                header.len(),
                expected.len()
            ),
        });
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let bad = |msg: String| Error::Artifact { path: path.to_path_buf(), msg };
        let record_id = rec[0].to_string();
        let start_index: usize = rec[1]
            .parse()
            .map_err(|_| bad(format!("bad start_index {:?}", &rec[1])))?;
        let label = SegmentLabel::parse(&rec[2])
            .ok_or_else(|| bad(format!("bad label {:?}", &rec[2])))?;
        let values: Vec<f64> = rec
            .iter()
            .skip(3)
            .map(|s| s.parse().map_err(|_| bad(format!("bad value {s:?}"))))
            .collect::<Result<_>>()?;
        rows.push(FeatureRow { record_id, start_index, label, values });
    }
    Ok(rows)
}

/// Assemble rows into the flat [`Dataset`](crate::types::Dataset) used by the
/// classifier stages.
pub fn rows_to_dataset(rows: &[FeatureRow]) -> crate::types::Dataset {
    let n_features = 3 * REGISTRY.len();
    let mut features = Vec::with_capacity(rows.len() * n_features);
    let mut labels = Vec::with_capacity(rows.len());
    let mut record_ids = Vec::with_capacity(rows.len());
    for row in rows {
        features.extend_from_slice(&row.values);
        labels.push(row.label);
        record_ids.push(row.record_id.clone());
    }
    crate::types::Dataset {
        features,
        n_features,
        labels,
        record_ids,
        feature_names: feature_names(),
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::Csv { path: path.to_path_buf(), source: e }
}

// ---------------------------------------------------------------------------
// Small shared helpers for the feature submodules
// ---------------------------------------------------------------------------

/// Non-overlapping full windows of `w` samples; a signal shorter than one
/// window is treated as a single window.
pub(crate) fn subwindows(n: usize, w: usize) -> Vec<std::ops::Range<usize>> {
    if w == 0 || n == 0 {
        return vec![0..n];
    }
    if n < w {
        return vec![0..n];
    }
    (0..n / w).map(|k| k * w..(k + 1) * w).collect()
}

pub(crate) fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

pub(crate) fn min_max(v: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &x in v {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    (lo, hi)
}
