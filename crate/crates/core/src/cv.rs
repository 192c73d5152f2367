//! Repeated stratified cross-validation for KNN feature subsets.
//!
//! One engine serves three callers: `tune_k` (pick k on training data),
//! `cv_ber` (score a feature subset during selection), and the final
//! evaluation (which pools confusion counts per repetition). Fold
//! assignments for repetition `r` depend only on the seed, the labels, and
//! `r`, so repetitions can run on any number of worker threads in any order
//! and still produce identical results.

use crate::error::{Error, Result};
use crate::knn::{self, Standardizer};
use crate::rng::stream_rng;
use crate::types::{Dataset, SegmentLabel};
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Cross-validation shape: `folds`-fold, repeated `repetitions` times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvSpec {
    pub folds: usize,
    pub repetitions: usize,
    pub stratified: bool,
    pub seed: u64,
}

impl Default for CvSpec {
    fn default() -> Self {
        CvSpec {
            folds: 5,
            repetitions: 50,
            stratified: true,
            seed: 0,
        }
    }
}

impl CvSpec {
    pub fn validate(&self) -> Result<()> {
        if self.folds < 2 {
            return Err(Error::InvalidInput {
                op: "cv",
                msg: format!("need at least 2 folds, got {}", self.folds),
            });
        }
        if self.repetitions == 0 {
            return Err(Error::InvalidInput {
                op: "cv",
                msg: "need at least 1 repetition".into(),
            });
        }
        Ok(())
    }
}

/// 2×2 confusion counts with SH as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    /// SH segments predicted SH.
    pub tp: u64,
    /// SH segments predicted NSH.
    pub r#fn: u64,
    /// NSH segments predicted NSH.
    pub tn: u64,
    /// NSH segments predicted SH.
    pub fp: u64,
}

impl ConfusionCounts {
    pub fn add(&mut self, truth: SegmentLabel, predicted: SegmentLabel) {
        use SegmentLabel::{Nsh, Sh};
        match (truth, predicted) {
            (Sh, Sh) => self.tp += 1,
            (Sh, Nsh) => self.r#fn += 1,
            (Nsh, Nsh) => self.tn += 1,
            (Nsh, Sh) => self.fp += 1,
        }
    }

    pub fn merge(&mut self, other: &ConfusionCounts) {
        self.tp += other.tp;
        self.r#fn += other.r#fn;
        self.tn += other.tn;
        self.fp += other.fp;
    }

    pub fn total(&self) -> u64 {
        self.tp + self.r#fn + self.tn + self.fp
    }

    /// Balanced error rate; both classes must be populated.
    pub fn ber(&self) -> Result<f64> {
        if self.tp + self.r#fn == 0 || self.tn + self.fp == 0 {
            return Err(Error::InvalidInput {
                op: "cv::ber",
                msg: "confusion counts have an empty class".into(),
            });
        }
        let se = self.tp as f64 / (self.tp + self.r#fn) as f64;
        let sp = self.tn as f64 / (self.tn + self.fp) as f64;
        Ok(1.0 - (se + sp) / 2.0)
    }
}

/// Fold index per row for one repetition.
///
/// Stratified: each class is shuffled and dealt round-robin, so fold class
/// counts differ by at most one. Record-grouped: whole records are dealt the
/// same way, stratified by each record's majority label, so no record spans
/// a train/eval boundary.
pub fn fold_assignments(
    data: &Dataset,
    spec: &CvSpec,
    group_by_record: bool,
    repetition: usize,
) -> Vec<usize> {
    let mut rng = stream_rng(spec.seed, "cv-folds", repetition as u64);
    let n = data.n_rows();
    let mut fold_of = vec![0usize; n];
    if group_by_record {
        let mut records: Vec<&str> = Vec::new();
        for id in &data.record_ids {
            if !records.contains(&id.as_str()) {
                records.push(id);
            }
        }
        let majority: Vec<SegmentLabel> = records
            .iter()
            .map(|&rec| {
                let sh = data
                    .record_ids
                    .iter()
                    .zip(&data.labels)
                    .filter(|(id, &l)| id.as_str() == rec && l == SegmentLabel::Sh)
                    .count();
                let total = data.record_ids.iter().filter(|id| id.as_str() == rec).count();
                if 2 * sh >= total {
                    SegmentLabel::Sh
                } else {
                    SegmentLabel::Nsh
                }
            })
            .collect();
        let mut rec_fold = vec![0usize; records.len()];
        for class in [SegmentLabel::Sh, SegmentLabel::Nsh] {
            let mut idx: Vec<usize> =
                (0..records.len()).filter(|&i| majority[i] == class).collect();
            if spec.stratified {
                idx.shuffle(&mut rng);
                for (pos, &i) in idx.iter().enumerate() {
                    rec_fold[i] = pos % spec.folds;
                }
            }
        }
        if !spec.stratified {
            let mut idx: Vec<usize> = (0..records.len()).collect();
            idx.shuffle(&mut rng);
            for (pos, &i) in idx.iter().enumerate() {
                rec_fold[i] = pos % spec.folds;
            }
        }
        for (row, id) in data.record_ids.iter().enumerate() {
            let ri = records.iter().position(|&r| r == id.as_str()).unwrap();
            fold_of[row] = rec_fold[ri];
        }
    } else if spec.stratified {
        for class in [SegmentLabel::Sh, SegmentLabel::Nsh] {
            let mut idx: Vec<usize> =
                (0..n).filter(|&i| data.labels[i] == class).collect();
            idx.shuffle(&mut rng);
            for (pos, &i) in idx.iter().enumerate() {
                fold_of[i] = pos % spec.folds;
            }
        }
    } else {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        for (pos, &i) in idx.iter().enumerate() {
            fold_of[i] = pos % spec.folds;
        }
    }
    fold_of
}

/// Confusion counts for one (repetition, fold) cell, one entry per grid k.
#[derive(Debug, Clone)]
pub struct FoldOutcome {
    pub repetition: usize,
    pub fold: usize,
    pub per_k: Vec<ConfusionCounts>,
}

/// Run every repetition × fold of a KNN evaluation over `cols`, scoring all
/// grid ks from a single neighbor search per fold. The standardizer is
/// refitted on each fold's training rows, never on the held-out rows.
/// Outcomes come back ordered by (repetition, fold) regardless of how rayon
/// schedules them.
pub fn run_repeated_cv(
    data: &Dataset,
    cols: &[usize],
    spec: &CvSpec,
    k_grid: &[usize],
    group_by_record: bool,
) -> Result<Vec<FoldOutcome>> {
    data.validate()?;
    spec.validate()?;
    if cols.is_empty() {
        return Err(Error::EmptyInput { op: "cv::run_repeated_cv" });
    }
    let n = data.n_rows();
    if n < spec.folds {
        return Err(Error::InvalidInput {
            op: "cv",
            msg: format!("{n} rows cannot fill {} folds", spec.folds),
        });
    }
    for &k in k_grid {
        if k % 2 == 0 || k == 0 {
            return Err(Error::InvalidInput {
                op: "cv",
                msg: format!("k grid must be odd and positive, got {k}"),
            });
        }
    }
    let outcomes: Result<Vec<Vec<FoldOutcome>>> = (0..spec.repetitions)
        .into_par_iter()
        .map(|rep| {
            let fold_of = fold_assignments(data, spec, group_by_record, rep);
            let mut outcomes = Vec::with_capacity(spec.folds);
            for fold in 0..spec.folds {
                let train_rows: Vec<usize> =
                    (0..n).filter(|&i| fold_of[i] != fold).collect();
                let eval_rows: Vec<usize> =
                    (0..n).filter(|&i| fold_of[i] == fold).collect();
                if eval_rows.is_empty() {
                    return Err(Error::InvalidInput {
                        op: "cv",
                        msg: format!("fold {fold} of repetition {rep} is empty"),
                    });
                }
                if let Some(&k) = k_grid.iter().find(|&&k| k > train_rows.len()) {
                    return Err(Error::InvalidInput {
                        op: "cv",
                        msg: format!(
                            "k = {k} exceeds the {} training rows of fold {fold}",
                            train_rows.len()
                        ),
                    });
                }
                let mut train = data.gather(&train_rows, cols);
                let mut eval = data.gather(&eval_rows, cols);
                let standardizer = Standardizer::fit(&train, cols.len());
                standardizer.transform(&mut train);
                standardizer.transform(&mut eval);
                let train_labels: Vec<SegmentLabel> =
                    train_rows.iter().map(|&i| data.labels[i]).collect();
                let predicted =
                    knn::batch_predict(&train, &train_labels, &eval, cols.len(), k_grid);
                let mut per_k = vec![ConfusionCounts::default(); k_grid.len()];
                for (qi, &row) in eval_rows.iter().enumerate() {
                    for (ki, counts) in per_k.iter_mut().enumerate() {
                        counts.add(data.labels[row], predicted[qi][ki]);
                    }
                }
                outcomes.push(FoldOutcome { repetition: rep, fold, per_k });
            }
            Ok(outcomes)
        })
        .collect();
    Ok(outcomes?.into_iter().flatten().collect())
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Mean/std of the per-fold balanced error rate of `cols` under `k`,
/// across all repetitions × folds.
pub fn cv_ber(
    data: &Dataset,
    cols: &[usize],
    spec: &CvSpec,
    k: usize,
    group_by_record: bool,
) -> Result<(f64, f64)> {
    let outcomes = run_repeated_cv(data, cols, spec, &[k], group_by_record)?;
    let bers: Result<Vec<f64>> = outcomes.iter().map(|o| o.per_k[0].ber()).collect();
    Ok(mean_std(&bers?))
}

/// Mean per-fold BER for each grid k, in grid order, from one engine run.
pub fn mean_ber_per_k(outcomes: &[FoldOutcome], k_grid: &[usize]) -> Result<Vec<f64>> {
    (0..k_grid.len())
        .map(|ki| {
            let bers: Result<Vec<f64>> =
                outcomes.iter().map(|o| o.per_k[ki].ber()).collect();
            Ok(mean_std(&bers?).0)
        })
        .collect()
}

/// Pick the grid k with the lowest mean CV BER on `data`; ties go to the
/// smaller k.
pub fn tune_k(
    data: &Dataset,
    cols: &[usize],
    spec: &CvSpec,
    k_grid: &[usize],
    group_by_record: bool,
) -> Result<usize> {
    if k_grid.is_empty() {
        return Err(Error::EmptyInput { op: "cv::tune_k" });
    }
    let mut grid: Vec<usize> = k_grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    let outcomes = run_repeated_cv(data, cols, spec, &grid, group_by_record)?;
    let means = mean_ber_per_k(&outcomes, &grid)?;
    let mut best = 0;
    for ki in 1..grid.len() {
        if means[ki] < means[best] {
            best = ki;
        }
    }
    Ok(grid[best])
}

/// The default k grid.
pub const DEFAULT_K_GRID: [usize; 6] = [1, 3, 5, 7, 9, 11];
