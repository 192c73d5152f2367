//! Definitional KNN used to cross-check the production classifier: plain
//! loops, full stable sort of (distance, training index), no shared code.

use shockdet_core::types::SegmentLabel;

/// Standardize train and queries with the training columns' mean and
/// population std (zero std becomes 1), then classify every query by
/// majority vote among its `k` nearest training rows under the Euclidean
/// distance, ties broken by the lower training index.
pub fn oracle_fit_predict(
    train: &[Vec<f64>],
    labels: &[SegmentLabel],
    queries: &[Vec<f64>],
    k: usize,
) -> Vec<SegmentLabel> {
    assert!(k % 2 == 1 && k <= train.len());
    let d = train[0].len();
    let n = train.len() as f64;
    let mut means = vec![0.0; d];
    let mut stds = vec![0.0; d];
    for c in 0..d {
        for row in train {
            means[c] += row[c];
        }
        means[c] /= n;
        for row in train {
            stds[c] += (row[c] - means[c]) * (row[c] - means[c]);
        }
        stds[c] = (stds[c] / n).sqrt();
        if stds[c] == 0.0 {
            stds[c] = 1.0;
        }
    }
    let z = |row: &[f64]| -> Vec<f64> {
        (0..d).map(|c| (row[c] - means[c]) / stds[c]).collect()
    };
    let z_train: Vec<Vec<f64>> = train.iter().map(|r| z(r)).collect();
    queries
        .iter()
        .map(|q| {
            let zq = z(q);
            let mut dists: Vec<(f64, usize)> = z_train
                .iter()
                .enumerate()
                .map(|(j, t)| {
                    let mut sum = 0.0;
                    for c in 0..d {
                        let diff = zq[c] - t[c];
                        sum += diff * diff;
                    }
                    (sum.sqrt(), j)
                })
                .collect();
            dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let sh = dists[..k]
                .iter()
                .filter(|&&(_, j)| labels[j] == SegmentLabel::Sh)
                .count();
            if 2 * sh > k {
                SegmentLabel::Sh
            } else {
                SegmentLabel::Nsh
            }
        })
        .collect()
}
