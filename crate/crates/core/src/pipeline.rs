//! End-to-end orchestration: configuration, stage caching, and artifacts.
//!
//! Stages run in a fixed order — ingest → preprocess → decompose → features
//! → select → evaluate — and each writes its artifacts plus a `.hash` file
//! into the cache directory. A stage's hash covers the config fields it
//! reads and the stored hash of its upstream stage, so a config change
//! invalidates exactly the stages that can see it. The master seed is the
//! only entropy source: the record split, every fold assignment, and the
//! synthetic-corpus generator (when used) all derive from it, which makes
//! `report.json` byte-identical across runs and worker counts.

use crate::cv::CvSpec;
use crate::error::{Error, Result};
use crate::eval::{self, FullReport, ReportCensus};
use crate::features::{self, FeatureRow};
use crate::ingest::{self, IngestConfig};
use crate::preprocess::{self, FilterChainConfig};
use crate::selection::{self, SelectionResult};
use crate::types::{Dataset, EcgSegment, SegmentLabel, SplitManifest};
use crate::vmd::{self, TriSignalEntry, VmdConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Top-level knobs: seed, directories, parallelism.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineSection {
    pub seed: u64,
    /// Worker threads; 0 means available parallelism.
    pub workers: usize,
    pub db_dir: PathBuf,
    pub cache_dir: PathBuf,
    /// Keep CV folds record-disjoint instead of segment-stratified.
    pub group_by_record: bool,
}

impl Default for PipelineSection {
    fn default() -> Self {
        PipelineSection {
            seed: 42,
            workers: 0,
            db_dir: PathBuf::from("data"),
            cache_dir: PathBuf::from("cache"),
            group_by_record: false,
        }
    }
}

/// Feature-selection stage configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectionSection {
    pub folds: usize,
    pub repetitions: usize,
    pub stratified: bool,
    pub k_grid: Vec<usize>,
}

impl Default for SelectionSection {
    fn default() -> Self {
        SelectionSection {
            folds: 5,
            repetitions: 50,
            stratified: true,
            k_grid: crate::cv::DEFAULT_K_GRID.to_vec(),
        }
    }
}

/// Final-evaluation stage configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSection {
    pub folds: usize,
    pub repetitions: usize,
    pub stratified: bool,
    /// Sensitivity variant: train on the training partition instead of
    /// within test folds.
    pub train_on_training_partition: bool,
}

impl Default for EvalSection {
    fn default() -> Self {
        EvalSection {
            folds: 5,
            repetitions: 50,
            stratified: true,
            train_on_training_partition: false,
        }
    }
}

/// Complete pipeline configuration, one section per stage family.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub pipeline: PipelineSection,
    pub ingest: IngestConfig,
    pub preprocess: FilterChainConfig,
    pub vmd: VmdConfig,
    pub selection: SelectionSection,
    pub eval: EvalSection,
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str, origin: &Path) -> Result<PipelineConfig> {
        let config: PipelineConfig = toml::from_str(text).map_err(|e| Error::Toml {
            path: origin.to_path_buf(),
            msg: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<PipelineConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        PipelineConfig::from_toml_str(&text, path)
    }

    /// Every numeric field checked against its module's invariants.
    pub fn validate(&self) -> Result<()> {
        self.ingest.validate()?;
        self.preprocess.validate()?;
        self.vmd.validate()?;
        self.selection_cv().validate()?;
        self.eval_cv().validate()?;
        if self.selection.k_grid.is_empty() {
            return Err(Error::Config("selection.k_grid must not be empty".into()));
        }
        for &k in &self.selection.k_grid {
            if k % 2 == 0 || k == 0 {
                return Err(Error::Config(format!(
                    "selection.k_grid entries must be odd and positive, got {k}"
                )));
            }
        }
        Ok(())
    }

    pub fn selection_cv(&self) -> CvSpec {
        CvSpec {
            folds: self.selection.folds,
            repetitions: self.selection.repetitions,
            stratified: self.selection.stratified,
            seed: self.pipeline.seed,
        }
    }

    pub fn eval_cv(&self) -> CvSpec {
        CvSpec {
            folds: self.eval.folds,
            repetitions: self.eval.repetitions,
            stratified: self.eval.stratified,
            seed: self.pipeline.seed,
        }
    }

    fn cache_path(&self, name: &str) -> PathBuf {
        self.pipeline.cache_dir.join(name)
    }
}

/// The six cacheable stages, in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Ingest,
    Preprocess,
    Decompose,
    Features,
    Select,
    Evaluate,
}

pub const STAGES: [Stage; 6] = [
    Stage::Ingest,
    Stage::Preprocess,
    Stage::Decompose,
    Stage::Features,
    Stage::Select,
    Stage::Evaluate,
];

impl Stage {
    pub fn name(&self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Preprocess => "preprocess",
            Stage::Decompose => "decompose",
            Stage::Features => "features",
            Stage::Select => "select",
            Stage::Evaluate => "evaluate",
        }
    }

    pub fn parse(s: &str) -> Option<Stage> {
        STAGES.iter().copied().find(|st| st.name() == s)
    }

    pub fn upstream(&self) -> Option<Stage> {
        match self {
            Stage::Ingest => None,
            Stage::Preprocess => Some(Stage::Ingest),
            Stage::Decompose => Some(Stage::Preprocess),
            Stage::Features => Some(Stage::Decompose),
            Stage::Select => Some(Stage::Features),
            Stage::Evaluate => Some(Stage::Select),
        }
    }

    /// Artifact files this stage writes, relative to the cache directory.
    pub fn artifacts(&self) -> &'static [&'static str] {
        match self {
            Stage::Ingest => &["segments.csv", "split.json"],
            Stage::Preprocess => &["preprocessed.csv"],
            Stage::Decompose => &["trisignals.bin"],
            Stage::Features => &["features.csv"],
            Stage::Select => &["selection.json", "curve.csv"],
            Stage::Evaluate => &["report.json", "report.md"],
        }
    }

    fn hash_file(&self) -> String {
        format!("{}.hash", self.name())
    }
}

/// What happened to one stage during a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageStatus {
    /// Artifacts were present with a matching hash; nothing recomputed.
    CacheHit,
    /// No previous artifacts; computed fresh.
    Computed,
    /// Artifacts existed but their hash was stale; recomputed.
    Recomputed,
}

fn sha256_hex(parts: &[&[u8]]) -> String {
    let mut hasher = Sha256::new();
    for p in parts {
        hasher.update(p);
        hasher.update([0u8]);
    }
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

fn config_json<T: Serialize>(section: &T) -> String {
    // Struct field order is fixed at compile time, so this is stable.
    serde_json::to_string(section).expect("config sections always serialize")
}

/// Names and sizes of every WFDB file under the data directory — enough to
/// notice records appearing, disappearing, or changing length.
fn corpus_fingerprint(db_dir: &Path) -> Result<String> {
    let mut entries: Vec<String> = Vec::new();
    let mut scan = |dir: &Path| -> Result<()> {
        for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
            let entry = entry.map_err(|e| Error::io(dir, e))?;
            let path = entry.path();
            let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
            if matches!(ext, "hea" | "dat" | "atr") {
                let len = entry.metadata().map_err(|e| Error::io(&path, e))?.len();
                let rel = path.strip_prefix(db_dir).unwrap_or(&path);
                entries.push(format!("{}:{len}", rel.to_string_lossy()));
            }
        }
        Ok(())
    };
    scan(db_dir)?;
    for entry in std::fs::read_dir(db_dir).map_err(|e| Error::io(db_dir, e))? {
        let entry = entry.map_err(|e| Error::io(db_dir, e))?;
        if entry.path().is_dir() {
            scan(&entry.path())?;
        }
    }
    entries.sort();
    Ok(entries.join("\n"))
}

/// The cache key of a stage: its config subset, chained onto the upstream
/// stage's *stored* hash so that any upstream recomputation ripples down.
fn stage_key(config: &PipelineConfig, stage: Stage) -> Result<String> {
    let upstream = match stage.upstream() {
        Some(up) => read_stored_hash(config, up).unwrap_or_default(),
        None => String::new(),
    };
    let own = match stage {
        Stage::Ingest => sha256_hex(&[
            config_json(&config.ingest).as_bytes(),
            config.pipeline.seed.to_string().as_bytes(),
            corpus_fingerprint(&config.pipeline.db_dir)?.as_bytes(),
        ]),
        Stage::Preprocess => sha256_hex(&[config_json(&config.preprocess).as_bytes()]),
        Stage::Decompose => sha256_hex(&[config_json(&config.vmd).as_bytes()]),
        Stage::Features => sha256_hex(&[features::REGISTRY_VERSION.as_bytes()]),
        Stage::Select => sha256_hex(&[
            config_json(&config.selection).as_bytes(),
            config.pipeline.seed.to_string().as_bytes(),
            config.pipeline.group_by_record.to_string().as_bytes(),
        ]),
        Stage::Evaluate => sha256_hex(&[
            config_json(&config.eval).as_bytes(),
            config.pipeline.seed.to_string().as_bytes(),
            config.pipeline.group_by_record.to_string().as_bytes(),
        ]),
    };
    Ok(sha256_hex(&[own.as_bytes(), upstream.as_bytes()]))
}

fn read_stored_hash(config: &PipelineConfig, stage: Stage) -> Option<String> {
    std::fs::read_to_string(config.cache_path(&stage.hash_file()))
        .ok()
        .map(|s| s.trim().to_string())
}

fn artifacts_present(config: &PipelineConfig, stage: Stage) -> bool {
    stage.artifacts().iter().all(|a| config.cache_path(a).is_file())
}

/// Run one stage, honoring the cache. Fails with [`Error::MissingUpstream`]
/// when the stage it depends on has not produced its artifacts.
pub fn run_stage(config: &PipelineConfig, stage: Stage) -> Result<StageStatus> {
    if let Some(up) = stage.upstream() {
        for artifact in up.artifacts() {
            let path = config.cache_path(artifact);
            if !path.is_file() {
                return Err(Error::MissingUpstream {
                    stage: stage.name(),
                    upstream: up.name(),
                    artifact: path,
                });
            }
        }
    }
    std::fs::create_dir_all(&config.pipeline.cache_dir)
        .map_err(|e| Error::io(&config.pipeline.cache_dir, e))?;
    let key = stage_key(config, stage)?;
    let stored = read_stored_hash(config, stage);
    let present = artifacts_present(config, stage);
    if present && stored.as_deref() == Some(key.as_str()) {
        log::info!("{}: cache hit", stage.name());
        return Ok(StageStatus::CacheHit);
    }
    let status = if present {
        log::warn!("{}: cache is stale, recomputing", stage.name());
        StageStatus::Recomputed
    } else {
        log::info!("{}: computing", stage.name());
        StageStatus::Computed
    };
    match stage {
        Stage::Ingest => stage_ingest(config)?,
        Stage::Preprocess => stage_preprocess(config)?,
        Stage::Decompose => stage_decompose(config)?,
        Stage::Features => stage_features(config)?,
        Stage::Select => stage_select(config)?,
        Stage::Evaluate => stage_evaluate(config)?,
    }
    let hash_path = config.cache_path(&stage.hash_file());
    std::fs::write(&hash_path, format!("{key}\n")).map_err(|e| Error::io(&hash_path, e))?;
    Ok(status)
}

/// Run every stage in order. Returns each stage's cache status.
pub fn run(config: &PipelineConfig) -> Result<Vec<(Stage, StageStatus)>> {
    config.validate()?;
    STAGES
        .iter()
        .map(|&stage| Ok((stage, run_stage(config, stage)?)))
        .collect()
}

fn stage_ingest(config: &PipelineConfig) -> Result<()> {
    let headers = ingest::discover_records(&config.pipeline.db_dir)?;
    if headers.is_empty() {
        return Err(Error::InvalidInput {
            op: "pipeline::ingest",
            msg: format!(
                "no .hea records under {}",
                config.pipeline.db_dir.display()
            ),
        });
    }
    let records: Result<Vec<Vec<EcgSegment>>> = headers
        .par_iter()
        .map(|hea| {
            let rec = ingest::resample_250(&ingest::read_record(hea)?);
            Ok(ingest::segment_and_label(&rec, &config.ingest.label_map))
        })
        .collect();
    let segments: Vec<EcgSegment> = records?.into_iter().flatten().collect();
    if segments.is_empty() {
        return Err(Error::InvalidInput {
            op: "pipeline::ingest",
            msg: "no labeled segments survived ingestion".into(),
        });
    }
    let ids: Vec<String> = segments.iter().map(|s| s.record_id.clone()).collect();
    let manifest = ingest::split_records(
        &ids,
        config.pipeline.seed,
        config.ingest.train_fraction,
    );
    ingest::write_segments_csv(&config.cache_path("segments.csv"), &segments)?;
    ingest::save_manifest(&config.cache_path("split.json"), &manifest)?;
    let sh = segments.iter().filter(|s| s.label == SegmentLabel::Sh).count();
    log::info!(
        "ingest: {} segments ({} SH / {} NSH) from {} records",
        segments.len(),
        sh,
        segments.len() - sh,
        manifest.train_record_ids.len() + manifest.test_record_ids.len()
    );
    Ok(())
}

fn stage_preprocess(config: &PipelineConfig) -> Result<()> {
    let segments = ingest::read_segments_csv(&config.cache_path("segments.csv"))?;
    let processed: Result<Vec<EcgSegment>> = segments
        .par_iter()
        .map(|seg| preprocess::preprocess_segment(seg, &config.preprocess))
        .collect();
    ingest::write_segments_csv(&config.cache_path("preprocessed.csv"), &processed?)
}

fn stage_decompose(config: &PipelineConfig) -> Result<()> {
    let segments = ingest::read_segments_csv(&config.cache_path("preprocessed.csv"))?;
    let entries: Result<Vec<TriSignalEntry>> = segments
        .par_iter()
        .map(|seg| {
            let dec = vmd::vmd_decompose(&seg.samples, &config.vmd)?;
            let tri = vmd::synthesize_tri(&seg.samples, &dec, &config.vmd)?;
            Ok(TriSignalEntry {
                record_id: seg.record_id.clone(),
                start_index: seg.start_index,
                tri,
            })
        })
        .collect();
    vmd::write_trisignals(&config.cache_path("trisignals.bin"), &entries?)
}

fn stage_features(config: &PipelineConfig) -> Result<()> {
    let entries = vmd::read_trisignals(&config.cache_path("trisignals.bin"))?;
    let segments = ingest::read_segments_csv(&config.cache_path("preprocessed.csv"))?;
    let labels: BTreeMap<(String, usize), SegmentLabel> = segments
        .iter()
        .map(|s| ((s.record_id.clone(), s.start_index), s.label))
        .collect();
    let rows: Result<Vec<FeatureRow>> = entries
        .par_iter()
        .map(|e| {
            let key = (e.record_id.clone(), e.start_index);
            let label = labels.get(&key).copied().ok_or_else(|| Error::Artifact {
                path: config.cache_path("trisignals.bin"),
                msg: format!(
                    "segment {}@{} has no label in preprocessed.csv",
                    e.record_id, e.start_index
                ),
            })?;
            Ok(FeatureRow {
                record_id: e.record_id.clone(),
                start_index: e.start_index,
                label,
                values: features::extract_all(&e.tri),
            })
        })
        .collect();
    features::write_features_csv(&config.cache_path("features.csv"), &rows?)
}

/// Split the feature rows into (train, test) datasets per the manifest.
fn load_split_datasets(config: &PipelineConfig) -> Result<(Dataset, Dataset, SplitManifest)> {
    let rows = features::read_features_csv(&config.cache_path("features.csv"))?;
    let manifest = ingest::load_manifest(&config.cache_path("split.json"))?;
    let (train_rows, test_rows): (Vec<FeatureRow>, Vec<FeatureRow>) = rows
        .into_iter()
        .partition(|r| manifest.is_train(&r.record_id));
    Ok((
        features::rows_to_dataset(&train_rows),
        features::rows_to_dataset(&test_rows),
        manifest,
    ))
}

fn stage_select(config: &PipelineConfig) -> Result<()> {
    let (train, _, _) = load_split_datasets(config)?;
    let result = selection::sffs(
        &train,
        &config.selection_cv(),
        &config.selection.k_grid,
        config.pipeline.group_by_record,
    )?;
    log::info!(
        "select: best subset has {} features (k = {}, mean BER {:.4})",
        result.best_size,
        result.best_k,
        result.curve[result.best_size - 1].mean_ber
    );
    selection::write_selection_json(&config.cache_path("selection.json"), &result)?;
    selection::write_curve_csv(&config.cache_path("curve.csv"), &result)
}

fn stage_evaluate(config: &PipelineConfig) -> Result<()> {
    let (train, test, _) = load_split_datasets(config)?;
    let sel = selection::read_selection_json(&config.cache_path("selection.json"))?;
    let cv = config.eval_cv();
    let metrics_report = if config.eval.train_on_training_partition {
        eval::evaluate_subset_with_training(&train, &test, &sel.best_subset, &cv, sel.best_k)?
    } else {
        eval::evaluate_subset(
            &test,
            &sel.best_subset,
            &cv,
            sel.best_k,
            config.pipeline.group_by_record,
        )?
    };
    let comparison = eval::comparison_table(&metrics_report)?;
    let count = |ds: &Dataset, label: SegmentLabel| {
        ds.labels.iter().filter(|&&l| l == label).count()
    };
    let report = FullReport {
        census: ReportCensus {
            train_sh: count(&train, SegmentLabel::Sh),
            train_nsh: count(&train, SegmentLabel::Nsh),
            test_sh: count(&test, SegmentLabel::Sh),
            test_nsh: count(&test, SegmentLabel::Nsh),
        },
        selection: sel,
        metrics: metrics_report,
        comparison,
    };
    log::info!(
        "evaluate: Ac {:.4} Se {:.4} Sp {:.4} BER {:.4}",
        report.metrics.mean.ac,
        report.metrics.mean.se,
        report.metrics.mean.sp,
        report.metrics.mean.ber
    );
    eval::write_report_json(&config.cache_path("report.json"), &report)?;
    eval::write_report_md(&config.cache_path("report.md"), &report)
}

/// Emit the BER-vs-size curve as plot-ready CSV.
pub fn plot_ber_curve(config: &PipelineConfig, out: &mut dyn Write) -> Result<()> {
    let path = config.cache_path("selection.json");
    if !path.is_file() {
        return Err(Error::MissingUpstream {
            stage: "plot-data",
            upstream: Stage::Select.name(),
            artifact: path,
        });
    }
    let result: SelectionResult = selection::read_selection_json(&path)?;
    let io_err = |e: std::io::Error| Error::io("stdout", e);
    writeln!(out, "size,mean_ber,std_ber").map_err(io_err)?;
    for p in &result.curve {
        writeln!(out, "{},{:?},{:?}", p.size, p.mean_ber, p.std_ber).map_err(io_err)?;
    }
    Ok(())
}

/// Emit one decomposed segment (ECG + SH + NSH signals) as plot-ready CSV.
/// The segment is picked by cache index, or by record id and start sample.
pub fn plot_trisignal(
    config: &PipelineConfig,
    index: usize,
    record: Option<(&str, usize)>,
    out: &mut dyn Write,
) -> Result<()> {
    let path = config.cache_path("trisignals.bin");
    if !path.is_file() {
        return Err(Error::MissingUpstream {
            stage: "plot-data",
            upstream: Stage::Decompose.name(),
            artifact: path,
        });
    }
    let entries = vmd::read_trisignals(&path)?;
    let entry = match record {
        Some((id, start)) => entries
            .iter()
            .find(|e| e.record_id == id && e.start_index == start)
            .ok_or_else(|| Error::Artifact {
                path: path.clone(),
                msg: format!("no decomposed segment {id}@{start}"),
            })?,
        None => entries.get(index).ok_or_else(|| Error::Artifact {
            path: path.clone(),
            msg: format!("segment index {index} out of range ({} cached)", entries.len()),
        })?,
    };
    let io_err = |e: std::io::Error| Error::io("stdout", e);
    writeln!(out, "sample,ecg,sh,nsh").map_err(io_err)?;
    for i in 0..entry.tri.ecg.len() {
        writeln!(
            out,
            "{},{:?},{:?},{:?}",
            i, entry.tri.ecg[i], entry.tri.sh[i], entry.tri.nsh[i]
        )
        .map_err(io_err)?;
    }
    Ok(())
}
