//! Final validation of a feature subset on held-out test data.
//!
//! Per repetition the test data is split into 5 stratified folds; each fold
//! is classified once with the other four folds as the KNN training set
//! (the protocol under study trains within the testing partition — the
//! train-on-training-partition variant exists for sensitivity analysis).
//! Confusion counts are pooled over the 5 folds before computing metrics,
//! then mean/std are aggregated over repetitions. The k used here is the one
//! tuned during selection; re-tuning on test data would leak.

use crate::cv::{self, ConfusionCounts, CvSpec};
use crate::error::{Error, Result};
use crate::knn::{self, Standardizer};
use crate::selection::SelectionResult;
use crate::types::{Dataset, SegmentLabel};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

/// Accuracy, sensitivity (SH recall), specificity (NSH recall), and
/// balanced error rate, all as fractions in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub ac: f64,
    pub se: f64,
    pub sp: f64,
    pub ber: f64,
}

/// Compute the four metrics from confusion counts. Both classes must be
/// populated, otherwise Se or Sp is undefined.
pub fn metrics(c: &ConfusionCounts) -> Result<Metrics> {
    if c.tp + c.r#fn == 0 {
        return Err(Error::InvalidInput {
            op: "eval::metrics",
            msg: "no SH segments: sensitivity undefined".into(),
        });
    }
    if c.tn + c.fp == 0 {
        return Err(Error::InvalidInput {
            op: "eval::metrics",
            msg: "no NSH segments: specificity undefined".into(),
        });
    }
    let se = c.tp as f64 / (c.tp + c.r#fn) as f64;
    let sp = c.tn as f64 / (c.tn + c.fp) as f64;
    Ok(Metrics {
        ac: (c.tp + c.tn) as f64 / c.total() as f64,
        se,
        sp,
        ber: 1.0 - (se + sp) / 2.0,
    })
}

/// Metrics of one evaluation run: per-repetition values plus aggregates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub seed: u64,
    pub feature_ids: Vec<String>,
    pub k: usize,
    /// Pooled confusion counts, one per repetition.
    pub confusions: Vec<ConfusionCounts>,
    pub per_repetition: Vec<Metrics>,
    pub mean: Metrics,
    pub std: Metrics,
}

fn aggregate(
    seed: u64,
    feature_ids: &[String],
    k: usize,
    confusions: Vec<ConfusionCounts>,
) -> Result<MetricsReport> {
    let per_repetition: Result<Vec<Metrics>> = confusions.iter().map(metrics).collect();
    let per_repetition = per_repetition?;
    let field = |f: fn(&Metrics) -> f64| -> (f64, f64) {
        let values: Vec<f64> = per_repetition.iter().map(f).collect();
        cv::mean_std(&values)
    };
    let (ac_m, ac_s) = field(|m| m.ac);
    let (se_m, se_s) = field(|m| m.se);
    let (sp_m, sp_s) = field(|m| m.sp);
    let (ber_m, ber_s) = field(|m| m.ber);
    Ok(MetricsReport {
        seed,
        feature_ids: feature_ids.to_vec(),
        k,
        confusions,
        per_repetition,
        mean: Metrics { ac: ac_m, se: se_m, sp: sp_m, ber: ber_m },
        std: Metrics { ac: ac_s, se: se_s, sp: sp_s, ber: ber_s },
    })
}

/// Repeated 5-fold CV of `feature_ids` on the test data, folds trained
/// within the test partition. `k` comes from selection, already tuned.
pub fn evaluate_subset(
    test: &Dataset,
    feature_ids: &[String],
    spec: &CvSpec,
    k: usize,
    group_by_record: bool,
) -> Result<MetricsReport> {
    let cols = crate::selection::subset_columns(test, feature_ids)?;
    let outcomes = cv::run_repeated_cv(test, &cols, spec, &[k], group_by_record)?;
    let mut confusions = vec![ConfusionCounts::default(); spec.repetitions];
    for o in &outcomes {
        confusions[o.repetition].merge(&o.per_k[0]);
    }
    aggregate(spec.seed, feature_ids, k, confusions)
}

/// Sensitivity-analysis variant: the KNN training set is the training
/// partition, and the whole test partition is classified against it.
/// Fold division no longer affects predictions, so every repetition yields
/// the same pooled counts and the aggregate std is exactly zero.
pub fn evaluate_subset_with_training(
    train: &Dataset,
    test: &Dataset,
    feature_ids: &[String],
    spec: &CvSpec,
    k: usize,
) -> Result<MetricsReport> {
    spec.validate()?;
    train.validate()?;
    test.validate()?;
    let train_cols = crate::selection::subset_columns(train, feature_ids)?;
    let test_cols = crate::selection::subset_columns(test, feature_ids)?;
    let d = feature_ids.len();
    if d == 0 {
        return Err(Error::EmptyInput { op: "eval::evaluate_subset_with_training" });
    }
    if k % 2 == 0 || k == 0 || k > train.n_rows() {
        return Err(Error::InvalidInput {
            op: "eval::evaluate_subset_with_training",
            msg: format!("k = {k} invalid for {} training rows", train.n_rows()),
        });
    }
    let rows_train: Vec<usize> = (0..train.n_rows()).collect();
    let rows_test: Vec<usize> = (0..test.n_rows()).collect();
    let mut train_matrix = train.gather(&rows_train, &train_cols);
    let mut test_matrix = test.gather(&rows_test, &test_cols);
    let standardizer = Standardizer::fit(&train_matrix, d);
    standardizer.transform(&mut train_matrix);
    standardizer.transform(&mut test_matrix);
    let predicted = knn::batch_predict(&train_matrix, &train.labels, &test_matrix, d, &[k]);
    let mut pooled = ConfusionCounts::default();
    for (i, labels) in predicted.iter().enumerate() {
        pooled.add(test.labels[i], labels[0]);
    }
    aggregate(spec.seed, feature_ids, k, vec![pooled; spec.repetitions])
}

/// One row of the performance-comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub method: String,
    pub ac_pct: f64,
    pub se_pct: f64,
    pub sp_pct: f64,
    /// "reported" for literature constants, "measured" for this run.
    pub source: String,
}

/// Literature results quoted for context. These are reported constants,
/// not reproduced measurements.
pub const COMPARISON_CONSTANTS: [(&str, f64, f64, f64); 2] = [
    ("Personalized features + SVM [5]", 99.3, 97.1, 99.2),
    ("Boosted-CART ensemble [6]", 99.1, 99.7, 98.9),
];

/// Render the comparison table: the two literature rows plus this run.
pub fn comparison_table(report: &MetricsReport) -> Result<Vec<ComparisonRow>> {
    if report.per_repetition.is_empty() {
        return Err(Error::EmptyInput { op: "eval::comparison_table" });
    }
    let mut rows: Vec<ComparisonRow> = COMPARISON_CONSTANTS
        .iter()
        .map(|&(method, ac, se, sp)| ComparisonRow {
            method: method.to_string(),
            ac_pct: ac,
            se_pct: se,
            sp_pct: sp,
            source: "reported".into(),
        })
        .collect();
    rows.push(ComparisonRow {
        method: "This work (VMD + KNN)".into(),
        ac_pct: report.mean.ac * 100.0,
        se_pct: report.mean.se * 100.0,
        sp_pct: report.mean.sp * 100.0,
        source: "measured".into(),
    });
    Ok(rows)
}

/// Segment census of the ingested corpus, echoed into reports.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportCensus {
    pub train_sh: usize,
    pub train_nsh: usize,
    pub test_sh: usize,
    pub test_nsh: usize,
}

/// Everything the final report carries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullReport {
    pub census: ReportCensus,
    pub selection: SelectionResult,
    pub metrics: MetricsReport,
    pub comparison: Vec<ComparisonRow>,
}

pub fn write_report_json(path: &Path, report: &FullReport) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = std::io::BufWriter::new(file);
    serde_json::to_writer_pretty(&mut writer, report)
        .map_err(|e| Error::Json { path: path.to_path_buf(), source: e })?;
    writer.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn read_report_json(path: &Path) -> Result<FullReport> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_reader(std::io::BufReader::new(file))
        .map_err(|e| Error::Json { path: path.to_path_buf(), source: e })
}

/// Human-readable report with dataset census, headline metrics, and the
/// comparison table. Contains no timestamps or absolute paths, so repeated
/// runs with one seed produce identical bytes.
pub fn render_report_md(report: &FullReport) -> String {
    let c = &report.census;
    let m = &report.metrics;
    let pct = |v: f64| format!("{:.2}", v * 100.0);
    let mut out = String::new();
    out.push_str("# Shockable-rhythm detection report\n\n");
    out.push_str("## Dataset\n\n");
    out.push_str("| Split | SH segments | NSH segments | Total |\n");
    out.push_str("|---|---:|---:|---:|\n");
    out.push_str(&format!(
        "| Train | {} | {} | {} |\n",
        c.train_sh,
        c.train_nsh,
        c.train_sh + c.train_nsh
    ));
    out.push_str(&format!(
        "| Test | {} | {} | {} |\n\n",
        c.test_sh,
        c.test_nsh,
        c.test_sh + c.test_nsh
    ));
    out.push_str("## Selected features\n\n");
    out.push_str(&format!(
        "{} of {} features, k = {}, selection seed {}.\n\n",
        report.selection.best_size,
        report.selection.ranked.len(),
        report.selection.best_k,
        report.selection.seed
    ));
    out.push_str(&format!("Subset: {}\n\n", report.selection.best_subset.join(", ")));
    out.push_str("## Test-set performance\n\n");
    out.push_str(&format!(
        "{} repetitions of stratified 5-fold cross-validation.\n\n",
        m.per_repetition.len()
    ));
    out.push_str("| Metric | Mean (%) | Std (%) |\n|---|---:|---:|\n");
    out.push_str(&format!("| Ac | {} | {} |\n", pct(m.mean.ac), pct(m.std.ac)));
    out.push_str(&format!("| Se | {} | {} |\n", pct(m.mean.se), pct(m.std.se)));
    out.push_str(&format!("| Sp | {} | {} |\n", pct(m.mean.sp), pct(m.std.sp)));
    out.push_str(&format!("| BER | {} | {} |\n\n", pct(m.mean.ber), pct(m.std.ber)));
    out.push_str("## Comparison\n\n");
    out.push_str("| Method | Ac (%) | Se (%) | Sp (%) | Source |\n|---|---:|---:|---:|---|\n");
    for row in &report.comparison {
        out.push_str(&format!(
            "| {} | {:.1} | {:.1} | {:.1} | {} |\n",
            row.method, row.ac_pct, row.se_pct, row.sp_pct, row.source
        ));
    }
    out.push_str(
        "\nLiterature rows are values reported by their authors, quoted for \
         context; only the final row was measured by this run.\n",
    );
    out
}

pub fn write_report_md(path: &Path, report: &FullReport) -> Result<()> {
    std::fs::write(path, render_report_md(report)).map_err(|e| Error::io(path, e))
}
