//! Sequential forward feature selection driven by repeated-CV KNN BER.
//!
//! Features are first ranked by their individual cross-validated BER, then a
//! single greedy forward pass walks that ranking: the candidate subset at
//! step `t` is the first `t` ranked features, scored with `k` re-tuned at
//! every step. The selected subset is the prefix with the lowest mean BER
//! (ties go to the smaller subset). There is no backward elimination — the
//! procedure is forward-only by design.

use crate::cv::{self, CvSpec};
use crate::error::{Error, Result};
use crate::types::Dataset;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

/// One point of the BER-vs-subset-size curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub size: usize,
    pub mean_ber: f64,
    pub std_ber: f64,
    /// k chosen for this subset size.
    pub k: usize,
    /// The full candidate subset at this size (a prefix of the ranking).
    pub feature_ids: Vec<String>,
}

/// Full output of a selection run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub seed: u64,
    /// Every feature id, best individual score first.
    pub ranked: Vec<String>,
    /// One point per subset size, 1..=n_features.
    pub curve: Vec<CurvePoint>,
    pub best_subset: Vec<String>,
    pub best_size: usize,
    /// k tuned for the best subset.
    pub best_k: usize,
}

/// Order feature columns by single-feature mean CV BER, ascending. For each
/// feature the score is its best mean BER over the k grid. Ties keep the
/// original column order, which for the standard registry is registry order.
pub fn rank_individual(
    train: &Dataset,
    spec: &CvSpec,
    k_grid: &[usize],
    group_by_record: bool,
) -> Result<Vec<usize>> {
    train.validate()?;
    let scores: Result<Vec<f64>> = (0..train.n_features)
        .into_par_iter()
        .map(|col| {
            let outcomes = cv::run_repeated_cv(train, &[col], spec, k_grid, group_by_record)?;
            let means = cv::mean_ber_per_k(&outcomes, k_grid)?;
            Ok(means.iter().copied().fold(f64::INFINITY, f64::min))
        })
        .collect();
    let scores = scores?;
    let mut order: Vec<usize> = (0..train.n_features).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
    Ok(order)
}

/// Run the full selection: rank, walk forward prefixes, pick the best one.
pub fn sffs(
    train: &Dataset,
    spec: &CvSpec,
    k_grid: &[usize],
    group_by_record: bool,
) -> Result<SelectionResult> {
    spec.validate()?;
    if k_grid.is_empty() {
        return Err(Error::EmptyInput { op: "selection::sffs" });
    }
    let mut grid: Vec<usize> = k_grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    let ranked_cols = rank_individual(train, spec, &grid, group_by_record)?;
    let ranked: Vec<String> = ranked_cols
        .iter()
        .map(|&c| train.feature_names[c].clone())
        .collect();
    let curve: Result<Vec<CurvePoint>> = (1..=ranked_cols.len())
        .into_par_iter()
        .map(|size| {
            let cols = &ranked_cols[..size];
            let outcomes = cv::run_repeated_cv(train, cols, spec, &grid, group_by_record)?;
            let means = cv::mean_ber_per_k(&outcomes, &grid)?;
            let mut best_ki = 0;
            for ki in 1..grid.len() {
                if means[ki] < means[best_ki] {
                    best_ki = ki;
                }
            }
            let bers: Result<Vec<f64>> =
                outcomes.iter().map(|o| o.per_k[best_ki].ber()).collect();
            let (mean_ber, std_ber) = cv::mean_std(&bers?);
            Ok(CurvePoint {
                size,
                mean_ber,
                std_ber,
                k: grid[best_ki],
                feature_ids: ranked[..size].to_vec(),
            })
        })
        .collect();
    let curve = curve?;
    let mut best = 0;
    for (i, point) in curve.iter().enumerate() {
        if point.mean_ber < curve[best].mean_ber {
            best = i;
        }
    }
    Ok(SelectionResult {
        seed: spec.seed,
        ranked,
        best_subset: curve[best].feature_ids.clone(),
        best_size: curve[best].size,
        best_k: curve[best].k,
        curve,
    })
}

/// Map a selection's feature ids back to column indices of a dataset.
pub fn subset_columns(data: &Dataset, feature_ids: &[String]) -> Result<Vec<usize>> {
    feature_ids
        .iter()
        .map(|id| {
            data.feature_names
                .iter()
                .position(|n| n == id)
                .ok_or_else(|| Error::InvalidInput {
                    op: "selection::subset_columns",
                    msg: format!("feature id `{id}` not present in dataset"),
                })
        })
        .collect()
}

pub fn write_selection_json(path: &Path, result: &SelectionResult) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = std::io::BufWriter::new(file);
    serde_json::to_writer_pretty(&mut writer, result)
        .map_err(|e| Error::Json { path: path.to_path_buf(), source: e })?;
    writer.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn read_selection_json(path: &Path) -> Result<SelectionResult> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_reader(std::io::BufReader::new(file))
        .map_err(|e| Error::Json { path: path.to_path_buf(), source: e })
}

/// Plot-ready BER curve: one row per subset size.
pub fn write_curve_csv(path: &Path, result: &SelectionResult) -> Result<()> {
    let mut out = String::from("size,mean_ber,std_ber,k\n");
    for p in &result.curve {
        out.push_str(&format!(
            "{},{:?},{:?},{}\n",
            p.size, p.mean_ber, p.std_ber, p.k
        ));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
