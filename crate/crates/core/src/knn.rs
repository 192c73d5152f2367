//! K-nearest-neighbors over standardized feature vectors.
//!
//! Euclidean distance on z-scored coordinates, odd `k` only (so votes cannot
//! tie), and distance ties broken by the lower training-row index so that
//! predictions are fully deterministic. Neighbor search is exhaustive — at
//! this problem's scale (thousands of segments, ≤93 dims) nothing fancier
//! pays for itself. The batch path factors the squared distance as
//! ‖q‖² + ‖t‖² − 2·q·t and hands the cross terms to a BLAS-style kernel.

use crate::error::{Error, Result};
use crate::types::{Dataset, SegmentLabel};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Per-feature affine normalization fitted on training data. Zero-variance
/// columns get std 1 so they wash out of every distance identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    /// Column means and population standard deviations of a row-major matrix.
    pub fn fit(matrix: &[f64], n_features: usize) -> Standardizer {
        let n_rows = if n_features == 0 { 0 } else { matrix.len() / n_features };
        let mut means = vec![0.0; n_features];
        for row in 0..n_rows {
            for (c, m) in means.iter_mut().enumerate() {
                *m += matrix[row * n_features + c];
            }
        }
        for m in means.iter_mut() {
            *m /= n_rows as f64;
        }
        let mut vars = vec![0.0; n_features];
        for row in 0..n_rows {
            for (c, v) in vars.iter_mut().enumerate() {
                let d = matrix[row * n_features + c] - means[c];
                *v += d * d;
            }
        }
        let stds = vars
            .iter()
            .map(|&v| {
                let s = (v / n_rows as f64).sqrt();
                if s > 0.0 {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        Standardizer { means, stds }
    }

    /// Z-score a row-major matrix in place.
    pub fn transform(&self, matrix: &mut [f64]) {
        let d = self.means.len();
        for row in matrix.chunks_mut(d) {
            for (c, v) in row.iter_mut().enumerate() {
                *v = (*v - self.means[c]) / self.stds[c];
            }
        }
    }
}

/// A fitted classifier: standardized training matrix, labels, `k`, and the
/// standardizer that maps raw queries into the model's coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub train_matrix: Vec<f64>,
    pub n_features: usize,
    pub train_labels: Vec<SegmentLabel>,
    pub k: usize,
    pub standardizer: Standardizer,
}

/// Fit a model on (a column subset of) the training data.
pub fn fit(train: &Dataset, k: usize) -> Result<KnnModel> {
    train.validate()?;
    let n = train.n_rows();
    check_k(k, n)?;
    let standardizer = Standardizer::fit(&train.features, train.n_features);
    let mut matrix = train.features.clone();
    standardizer.transform(&mut matrix);
    Ok(KnnModel {
        train_matrix: matrix,
        n_features: train.n_features,
        train_labels: train.labels.clone(),
        k,
        standardizer,
    })
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k % 2 == 0 || k == 0 {
        return Err(Error::InvalidInput {
            op: "knn::fit",
            msg: format!("k must be odd and positive, got {k}"),
        });
    }
    if k > n {
        return Err(Error::InvalidInput {
            op: "knn::fit",
            msg: format!("k = {k} exceeds the {n} training rows"),
        });
    }
    Ok(())
}

impl KnnModel {
    /// Classify one raw (unstandardized) query vector.
    pub fn predict(&self, x: &[f64]) -> Result<SegmentLabel> {
        if x.len() != self.n_features {
            return Err(Error::ShapeMismatch {
                op: "knn::predict",
                expected: self.n_features,
                got: x.len(),
            });
        }
        let mut q = x.to_vec();
        for (c, v) in q.iter_mut().enumerate() {
            *v = (*v - self.standardizer.means[c]) / self.standardizer.stds[c];
        }
        let labels = batch_predict(
            &self.train_matrix,
            &self.train_labels,
            &q,
            self.n_features,
            &[self.k],
        );
        Ok(labels[0][0])
    }

    /// Serialize as JSON; floats round-trip bit-exactly (finite by contract).
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        serde_json::to_writer(std::io::BufWriter::new(file), self)
            .map_err(|e| Error::Json { path: path.to_path_buf(), source: e })
    }

    pub fn load(path: &Path) -> Result<KnnModel> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_reader(std::io::BufReader::new(file))
            .map_err(|e| Error::Json { path: path.to_path_buf(), source: e })
    }
}

/// Classify every query row under each `k` in `k_grid` at once.
///
/// Both matrices must already be standardized and row-major with `d`
/// columns. Returns one label per query per grid entry, indexed
/// `[query][k_idx]`. Every `k` must be odd and ≤ the training-row count.
pub fn batch_predict(
    train: &[f64],
    train_labels: &[SegmentLabel],
    queries: &[f64],
    d: usize,
    k_grid: &[usize],
) -> Vec<Vec<SegmentLabel>> {
    let n = train_labels.len();
    let m = if d == 0 { 0 } else { queries.len() / d };
    let k_max = k_grid.iter().copied().max().unwrap_or(1);
    debug_assert!(k_grid.iter().all(|&k| k % 2 == 1 && k <= n));

    let train_norms: Vec<f64> = (0..n)
        .map(|j| train[j * d..(j + 1) * d].iter().map(|v| v * v).sum())
        .collect();

    let mut out = Vec::with_capacity(m);
    // Chunk the queries so the m×n cross-product block stays cache- and
    // memory-friendly regardless of fold sizes.
    const CHUNK: usize = 512;
    let mut cross = vec![0.0f64; CHUNK * n];
    let mut order: Vec<u32> = Vec::with_capacity(n);
    for chunk_start in (0..m).step_by(CHUNK) {
        let rows = CHUNK.min(m - chunk_start);
        let q_block = &queries[chunk_start * d..(chunk_start + rows) * d];
        // cross[i][j] = q_i · t_j
        unsafe {
            matrixmultiply::dgemm(
                rows,
                d,
                n,
                1.0,
                q_block.as_ptr(),
                d as isize,
                1,
                train.as_ptr(),
                1,
                d as isize,
                0.0,
                cross.as_mut_ptr(),
                n as isize,
                1,
            );
        }
        for i in 0..rows {
            let q = &q_block[i * d..(i + 1) * d];
            let q_norm: f64 = q.iter().map(|v| v * v).sum();
            let row = &cross[i * n..(i + 1) * n];
            let dist2 = |j: u32| {
                let v = q_norm + train_norms[j as usize] - 2.0 * row[j as usize];
                v.max(0.0)
            };
            order.clear();
            order.extend(0..n as u32);
            let by_distance_then_index = |a: &u32, b: &u32| {
                dist2(*a).total_cmp(&dist2(*b)).then(a.cmp(b))
            };
            if k_max < n {
                order.select_nth_unstable_by(k_max - 1, by_distance_then_index);
                order.truncate(k_max);
            }
            order.sort_unstable_by(by_distance_then_index);
            let labels = k_grid
                .iter()
                .map(|&k| {
                    let sh_votes = order[..k]
                        .iter()
                        .filter(|&&j| train_labels[j as usize] == SegmentLabel::Sh)
                        .count();
                    if 2 * sh_votes > k {
                        SegmentLabel::Sh
                    } else {
                        SegmentLabel::Nsh
                    }
                })
                .collect();
            out.push(labels);
        }
    }
    out
}
