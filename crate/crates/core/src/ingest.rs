//! Corpus ingest: discover WFDB records, pull channel 0 into physical units,
//! resample to 250 Hz, cut non-overlapping 8-second windows labeled from the
//! rhythm annotation stream, and split records (not segments) into
//! train/test sets.

use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::types::{Db, EcgRecord, EcgSegment, LabelClass, SegmentLabel, SplitManifest, SEGMENT_LEN, TARGET_FS};
use crate::wfdb::{self, Annotation};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

/// Ingest stage configuration (`[ingest]` in the pipeline config).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestConfig {
    /// Fraction of records assigned to the training set.
    pub train_fraction: f64,
    /// Rhythm string → class. Strings not listed map to NSH; unannotated
    /// stretches are dropped.
    pub label_map: BTreeMap<String, LabelClass>,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            train_fraction: 0.7,
            label_map: default_label_map(),
        }
    }
}

impl IngestConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Config(format!(
                "ingest.train_fraction must be in (0, 1), got {}",
                self.train_fraction
            )));
        }
        Ok(())
    }
}

/// Default rhythm-string classes: ventricular fibrillation, tachycardia and
/// flutter are shockable; noise and asystole stretches leave the corpus;
/// any other annotated rhythm is non-shockable.
pub fn default_label_map() -> BTreeMap<String, LabelClass> {
    let mut m = BTreeMap::new();
    for sh in ["VF", "VT", "VFL", "VFIB"] {
        m.insert(sh.to_string(), LabelClass::Sh);
    }
    for discard in ["NOISE", "ASYS"] {
        m.insert(discard.to_string(), LabelClass::Discard);
    }
    m
}

fn class_of(rhythm: &str, label_map: &BTreeMap<String, LabelClass>) -> LabelClass {
    label_map
        .get(rhythm)
        .copied()
        .unwrap_or(LabelClass::Nsh)
}

/// Find every `.hea` file directly in `db_dir` or one directory below it,
/// sorted by path for determinism.
pub fn discover_records(db_dir: &Path) -> Result<Vec<PathBuf>> {
    let mut found = Vec::new();
    let scan_dir = |dir: &Path, out: &mut Vec<PathBuf>| -> Result<()> {
        for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
            let entry = entry.map_err(|e| Error::io(dir, e))?;
            let path = entry.path();
            if path.extension().is_some_and(|e| e == "hea") {
                out.push(path);
            }
        }
        Ok(())
    };
    scan_dir(db_dir, &mut found)?;
    for entry in fs::read_dir(db_dir).map_err(|e| Error::io(db_dir, e))? {
        let entry = entry.map_err(|e| Error::io(db_dir, e))?;
        if entry.path().is_dir() {
            scan_dir(&entry.path(), &mut found)?;
        }
    }
    found.sort();
    Ok(found)
}

/// Normalize an annotation stream into rhythm-change events:
/// `+` annotations contribute their aux rhythm (leading `(` stripped,
/// uppercased), `[`/`]` mark VF episodes. Events at one sample collapse to
/// the last. Beat annotations carry no rhythm information and are ignored.
pub fn rhythm_stream(anns: &[Annotation]) -> Vec<(usize, String)> {
    let mut out: Vec<(usize, String)> = Vec::new();
    for a in anns {
        let rhythm = match a.code {
            wfdb::code::RHYTHM => match &a.aux {
                Some(aux) => {
                    let s = aux.trim_start_matches('(').trim().to_ascii_uppercase();
                    if s.is_empty() {
                        continue;
                    }
                    s
                }
                None => continue,
            },
            wfdb::code::VFON => "VF".to_string(),
            wfdb::code::VFOFF => "N".to_string(),
            _ => continue,
        };
        let t = a.time as usize;
        match out.last_mut() {
            Some((lt, lr)) if *lt == t => *lr = rhythm,
            _ => out.push((t, rhythm)),
        }
    }
    out
}

/// Read one WFDB record: channel 0 in physical units plus its rhythm stream.
/// A missing annotation file, like an unannotated lead-in, simply leaves the
/// affected windows unlabeled (they drop out during segmentation).
pub fn read_record(hea_path: &Path) -> Result<EcgRecord> {
    let text = fs::read_to_string(hea_path).map_err(|e| Error::io(hea_path, e))?;
    let header = wfdb::parse_header(hea_path, &text)?;
    let channels = wfdb::read_signal_file(&wfdb::dat_path(hea_path, &header), &header)?;
    let spec = &header.signals[0];
    let samples: Vec<f64> = channels[0]
        .iter()
        .map(|&adc| (f64::from(adc) - f64::from(spec.baseline)) / spec.gain)
        .collect();
    if samples.is_empty() {
        return Err(Error::EmptyInput {
            op: "ingest::read_record",
        });
    }

    let record_id = hea_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| header.record_name.clone());
    let db = hea_path
        .parent()
        .and_then(Path::file_name)
        .map(|d| Db::from_dir_name(&d.to_string_lossy()))
        .unwrap_or(Db::Other);

    let atr = hea_path.with_extension("atr");
    let annotations = if atr.exists() {
        let anns = wfdb::read_annotations(&atr)?;
        let stream = rhythm_stream(&anns);
        if let Some(&(last, _)) = stream.last().filter(|(t, _)| *t >= samples.len()) {
            return Err(Error::AnnotationParse {
                path: atr,
                msg: format!(
                    "annotation at sample {last} beyond record length {}",
                    samples.len()
                ),
            });
        }
        stream
    } else {
        log::warn!("no annotation file for {record_id}; record contributes no segments");
        Vec::new()
    };

    Ok(EcgRecord {
        record_id,
        db,
        samples,
        fs_native: header.fs,
        annotations,
    })
}

/// Resample to 250 Hz by linear interpolation; identity when already there.
/// Annotation indices are rescaled to the new rate.
pub fn resample_250(rec: &EcgRecord) -> EcgRecord {
    if rec.fs_native == TARGET_FS {
        return rec.clone();
    }
    let ratio = TARGET_FS / rec.fs_native;
    let n_in = rec.samples.len();
    let n_out = ((n_in - 1) as f64 * ratio).floor() as usize + 1;
    let mut samples = Vec::with_capacity(n_out);
    for i in 0..n_out {
        let p = i as f64 / ratio;
        let lo = p.floor() as usize;
        if lo + 1 >= n_in {
            samples.push(rec.samples[n_in - 1]);
        } else {
            let frac = p - lo as f64;
            samples.push(rec.samples[lo] * (1.0 - frac) + rec.samples[lo + 1] * frac);
        }
    }
    let mut annotations: Vec<(usize, String)> = Vec::with_capacity(rec.annotations.len());
    for (idx, rhythm) in &rec.annotations {
        let t = ((*idx as f64 * ratio).round() as usize).min(n_out.saturating_sub(1));
        match annotations.last_mut() {
            Some((lt, lr)) if *lt == t => *lr = rhythm.clone(),
            _ => annotations.push((t, rhythm.clone())),
        }
    }
    EcgRecord {
        record_id: rec.record_id.clone(),
        db: rec.db,
        samples,
        fs_native: TARGET_FS,
        annotations,
    }
}

/// Cut consecutive non-overlapping 2000-sample windows and label each by the
/// class covering the majority of its samples. Windows whose majority class
/// is `discard` — or that lie before the first annotation — are dropped, as
/// is a trailing partial window. An SH/NSH tie resolves to SH.
pub fn segment_and_label(
    rec: &EcgRecord,
    label_map: &BTreeMap<String, LabelClass>,
) -> Vec<EcgSegment> {
    debug_assert_eq!(rec.fs_native, TARGET_FS, "segment_and_label expects 250 Hz");
    let n = rec.samples.len();
    let mut out = Vec::with_capacity(n / SEGMENT_LEN);
    // Annotation cursor state: rhythm class in force, advanced window by window.
    let mut events = rec.annotations.iter().peekable();
    let mut current: Option<LabelClass> = None;
    for start in (0..n).step_by(SEGMENT_LEN) {
        if start + SEGMENT_LEN > n {
            break; // trailing partial window
        }
        // counts: [unlabeled, SH, NSH, discard]
        let mut counts = [0usize; 4];
        let mut cursor = start;
        loop {
            let next_change = events.peek().map(|(t, _)| *t);
            let span_end = match next_change {
                Some(t) if t < start + SEGMENT_LEN => t.max(cursor),
                _ => start + SEGMENT_LEN,
            };
            let bucket = match current {
                None => 0,
                Some(LabelClass::Sh) => 1,
                Some(LabelClass::Nsh) => 2,
                Some(LabelClass::Discard) => 3,
            };
            counts[bucket] += span_end - cursor;
            cursor = span_end;
            if cursor >= start + SEGMENT_LEN {
                break;
            }
            let (_, rhythm) = events.next().expect("peeked event");
            current = Some(class_of(rhythm, label_map));
        }
        let max = *counts.iter().max().expect("non-empty");
        let label = if counts[1] == max && counts[1] > 0 {
            // SH wins ties against every other bucket
            Some(SegmentLabel::Sh)
        } else if counts[2] == max && counts[2] > 0 {
            Some(SegmentLabel::Nsh)
        } else {
            None // unlabeled or discard majority
        };
        if let Some(label) = label {
            out.push(EcgSegment {
                record_id: rec.record_id.clone(),
                start_index: start,
                samples: rec.samples[start..start + SEGMENT_LEN].to_vec(),
                label,
            });
        }
    }
    out
}

/// Deterministic record-level split: shuffle the sorted ids with the
/// seed-derived stream, take `round(train_fraction · n)` for training.
pub fn split_records(record_ids: &[String], seed: u64, train_fraction: f64) -> SplitManifest {
    let mut ids: Vec<String> = record_ids.to_vec();
    ids.sort();
    ids.dedup();
    let mut rng = stream_rng(seed, "split", 0);
    ids.shuffle(&mut rng);
    let n_train = (train_fraction * ids.len() as f64).round() as usize;
    let n_train = n_train.min(ids.len());
    SplitManifest {
        train_record_ids: ids[..n_train].iter().cloned().collect(),
        test_record_ids: ids[n_train..].iter().cloned().collect(),
        seed,
    }
}

/// Write segments as CSV: `record_id,start_index,label,s0..s1999`.
pub fn write_segments_csv(path: &Path, segments: &[EcgSegment]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Csv {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut header = vec!["record_id".to_string(), "start_index".into(), "label".into()];
    header.extend((0..SEGMENT_LEN).map(|i| format!("s{i}")));
    let io_err = |e: csv::Error| Error::Csv {
        path: path.to_path_buf(),
        source: e,
    };
    w.write_record(&header).map_err(io_err)?;
    for seg in segments {
        let mut row = vec![
            seg.record_id.clone(),
            seg.start_index.to_string(),
            seg.label.as_str().to_string(),
        ];
        row.extend(seg.samples.iter().map(|v| v.to_string()));
        w.write_record(&row).map_err(io_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Read back a segments CSV written by [`write_segments_csv`].
pub fn read_segments_csv(path: &Path) -> Result<Vec<EcgSegment>> {
    let csv_err = |e: csv::Error| Error::Csv {
        path: path.to_path_buf(),
        source: e,
    };
    let bad = |msg: String| Error::Artifact {
        path: path.to_path_buf(),
        msg,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        if rec.len() != 3 + SEGMENT_LEN {
            return Err(bad(format!(
                "row {i}: expected {} columns, got {}",
                3 + SEGMENT_LEN,
                rec.len()
            )));
        }
        let label = SegmentLabel::parse(&rec[2])
            .ok_or_else(|| bad(format!("row {i}: unknown label `{}`", &rec[2])))?;
        let mut samples = Vec::with_capacity(SEGMENT_LEN);
        for s in rec.iter().skip(3) {
            samples.push(
                s.parse::<f64>()
                    .map_err(|_| bad(format!("row {i}: bad sample `{s}`")))?,
            );
        }
        out.push(EcgSegment {
            record_id: rec[0].to_string(),
            start_index: rec[1]
                .parse()
                .map_err(|_| bad(format!("row {i}: bad start_index `{}`", &rec[1])))?,
            samples,
            label,
        });
    }
    Ok(out)
}

/// Save a split manifest as JSON.
pub fn save_manifest(path: &Path, manifest: &SplitManifest) -> Result<()> {
    let json = serde_json::to_string_pretty(manifest).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })?;
    fs::write(path, json).map_err(|e| Error::io(path, e))
}

/// Load a split manifest saved by [`save_manifest`].
pub fn load_manifest(path: &Path) -> Result<SplitManifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })
}
