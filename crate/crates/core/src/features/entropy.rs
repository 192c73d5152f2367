//! Entropy features: dispersion, sample, Rényi, fuzzy and wavelet entropies,
//! plus raw signal energy.

use super::{min_max, Ctx};

/// Normalized dispersion entropy: samples are mapped through the normal CDF
/// into 6 classes, consecutive pairs form patterns, and the Shannon entropy
/// of the pattern distribution is normalized by ln 36.
pub(crate) fn disp_en(c: &Ctx) -> f64 {
    if c.n < 2 || c.std == 0.0 {
        return 0.0;
    }
    let classes: Vec<usize> = c
        .x
        .iter()
        .map(|&v| {
            let z = normal_cdf((v - c.mean) / c.std);
            ((6.0 * z + 0.5).round() as i64).clamp(1, 6) as usize
        })
        .collect();
    let mut counts = [0usize; 36];
    for w in classes.windows(2) {
        counts[(w[0] - 1) * 6 + (w[1] - 1)] += 1;
    }
    let total = (c.n - 1) as f64;
    let h: f64 = counts
        .iter()
        .filter(|&&cnt| cnt > 0)
        .map(|&cnt| {
            let p = cnt as f64 / total;
            -p * p.ln()
        })
        .sum();
    h / 36.0f64.ln()
}

fn normal_cdf(u: f64) -> f64 {
    0.5 * (1.0 + libm::erf(u / std::f64::consts::SQRT_2))
}

/// Sample entropy with m=2, r=0.2σ.
pub(crate) fn samp_en(c: &Ctx) -> f64 {
    sample_entropy(c.x, 2, 0.2 * c.std)
}

/// Sample entropy −ln(A/B): template matches of length m+1 over matches of
/// length m, Chebyshev distance, both counted over the same start range.
/// Degenerate cases (r ≤ 0, too short, no matches at either length) give 0.
pub fn sample_entropy(x: &[f64], m: usize, r: f64) -> f64 {
    let n = x.len();
    if r <= 0.0 || n < m + 2 {
        return 0.0;
    }
    let templates = n - m;
    let mut matches_m = 0u64;
    let mut matches_m1 = 0u64;
    for i in 0..templates {
        for j in i + 1..templates {
            let mut d = 0.0f64;
            for t in 0..m {
                d = d.max((x[i + t] - x[j + t]).abs());
            }
            if d <= r {
                matches_m += 1;
                if d.max((x[i + m] - x[j + m]).abs()) <= r {
                    matches_m1 += 1;
                }
            }
        }
    }
    if matches_m == 0 || matches_m1 == 0 {
        return 0.0;
    }
    -((matches_m1 as f64 / matches_m as f64).ln())
}

/// Raw energy Σx².
pub(crate) fn energy(c: &Ctx) -> f64 {
    c.x.iter().map(|&v| v * v).sum()
}

/// Rényi entropy of order 2 over a 64-bin amplitude histogram on [min, max].
pub(crate) fn renyi_en(c: &Ctx) -> f64 {
    const BINS: usize = 64;
    let (lo, hi) = min_max(c.x);
    let range = hi - lo;
    let mut counts = [0u64; BINS];
    for &v in c.x {
        let idx = if range <= 0.0 {
            0
        } else {
            (((v - lo) / range * BINS as f64).floor() as usize).min(BINS - 1)
        };
        counts[idx] += 1;
    }
    let sum_sq: f64 = counts
        .iter()
        .map(|&cnt| {
            let p = cnt as f64 / c.n as f64;
            p * p
        })
        .sum();
    -sum_sq.ln()
}

/// Fuzzy entropy with m=2, r=0.2σ.
pub(crate) fn fuzzy_en(c: &Ctx) -> f64 {
    fuzzy_entropy(c.x, 2, 0.2 * c.std)
}

/// Fuzzy entropy −ln(φ_{m+1}/φ_m) with exponential membership
/// exp(−(d/r)²) of the Chebyshev template distance (raw templates).
pub fn fuzzy_entropy(x: &[f64], m: usize, r: f64) -> f64 {
    let n = x.len();
    if r <= 0.0 || n < m + 2 {
        return 0.0;
    }
    let templates = n - m;
    let mut phi_m = 0.0f64;
    let mut phi_m1 = 0.0f64;
    for i in 0..templates {
        for j in i + 1..templates {
            let mut d = 0.0f64;
            for t in 0..m {
                d = d.max((x[i + t] - x[j + t]).abs());
            }
            let dm = d / r;
            phi_m += (-(dm * dm)).exp();
            let d1 = d.max((x[i + m] - x[j + m]).abs()) / r;
            phi_m1 += (-(d1 * d1)).exp();
        }
    }
    if phi_m <= 0.0 || phi_m1 <= 0.0 {
        return 0.0;
    }
    -((phi_m1 / phi_m).ln())
}

/// Shannon entropy of the relative subband energies of a 5-level Haar
/// decomposition (five detail bands plus the final approximation); an odd
/// length at any level drops its trailing sample.
pub(crate) fn wavelet_en(c: &Ctx) -> f64 {
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut current = c.x.to_vec();
    let mut energies = Vec::with_capacity(6);
    for _ in 0..5 {
        let pairs = current.len() / 2;
        let mut approx = Vec::with_capacity(pairs);
        let mut detail_energy = 0.0;
        for k in 0..pairs {
            let a = (current[2 * k] + current[2 * k + 1]) / sqrt2;
            let d = (current[2 * k] - current[2 * k + 1]) / sqrt2;
            approx.push(a);
            detail_energy += d * d;
        }
        energies.push(detail_energy);
        current = approx;
    }
    energies.push(current.iter().map(|&v| v * v).sum());
    let total: f64 = energies.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    energies
        .iter()
        .filter(|&&e| e > 0.0)
        .map(|&e| {
            let p = e / total;
            -p * p.ln()
        })
        .sum()
}
