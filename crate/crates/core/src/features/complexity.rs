//! Complexity features: phase-space and Hilbert-plane grid occupancy,
//! Lempel–Ziv complexity, binary-envelope statistics and kurtosis.

use super::{min_max, Ctx};
use crate::spectrum;

const GRID: usize = 40;

fn cell(v: f64, lo: f64, range: f64) -> usize {
    if range <= 0.0 {
        return 0;
    }
    (((v - lo) / range * GRID as f64).floor() as usize).min(GRID - 1)
}

/// Axis extent for the occupancy grids. An axis whose spread is negligible
/// against the joint plane scale (≤ 1e-9 relative) is treated as flat, so a
/// constant signal — whose FFT-based Hilbert transform carries ~1e-15
/// numerical jitter instead of exact zeros — maps to a single cell.
fn axis(v: &[f64], plane_scale: f64) -> (f64, f64) {
    let (lo, hi) = min_max(v);
    let range = hi - lo;
    if range <= 1e-9 * plane_scale {
        (lo, 0.0)
    } else {
        (lo, range)
    }
}

/// Phase-space reconstruction: occupancy of a 40×40 grid over
/// (x(t), x(t + 0.5 s)), both axes spanning the signal's [min, max].
pub(crate) fn psr(c: &Ctx) -> f64 {
    let delay = (0.5 * c.fs).round() as usize;
    if c.n <= delay {
        return 0.0;
    }
    let (lo, range) = axis(c.x, c.max_abs);
    let mut occupied = vec![false; GRID * GRID];
    for i in 0..c.n - delay {
        let ix = cell(c.x[i], lo, range);
        let iy = cell(c.x[i + delay], lo, range);
        occupied[ix * GRID + iy] = true;
    }
    occupied.iter().filter(|&&b| b).count() as f64 / (GRID * GRID) as f64
}

/// Hilbert-plane occupancy: the same grid over (x(t), H[x](t)), each axis
/// spanning its own series' range.
pub(crate) fn hilb(c: &Ctx) -> f64 {
    let h: Vec<f64> = spectrum::analytic_signal(c.x).iter().map(|z| z.im).collect();
    let h_max = h.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
    let plane_scale = c.max_abs.max(h_max);
    let (xlo, xrange) = axis(c.x, plane_scale);
    let (ylo, yrange) = axis(&h, plane_scale);
    let mut occupied = vec![false; GRID * GRID];
    for i in 0..c.n {
        let ix = cell(c.x[i], xlo, xrange);
        let iy = cell(h[i], ylo, yrange);
        occupied[ix * GRID + iy] = true;
    }
    occupied.iter().filter(|&&b| b).count() as f64 / (GRID * GRID) as f64
}

/// Lempel–Ziv phrase count of a binary sequence (Kaspar–Schuster scan).
pub(crate) fn lz76(s: &[u8]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    if n == 1 {
        return 1;
    }
    let mut c = 1usize;
    let mut l = 1usize;
    let mut i = 0usize;
    let mut k = 1usize;
    let mut k_max = 1usize;
    loop {
        if s[i + k - 1] == s[l + k - 1] {
            k += 1;
            if l + k > n {
                c += 1;
                break;
            }
        } else {
            if k > k_max {
                k_max = k;
            }
            i += 1;
            if i == l {
                c += 1;
                l += k_max;
                if l + 1 > n {
                    break;
                }
                i = 0;
                k = 1;
                k_max = 1;
            } else {
                k = 1;
            }
        }
    }
    c
}

/// Normalized Lempel–Ziv complexity of the above-median binarization:
/// c(n) · log2(n) / n.
pub(crate) fn cm(c: &Ctx) -> f64 {
    if c.n < 2 {
        return 0.0;
    }
    let mut sorted = c.x.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = if c.n % 2 == 1 {
        sorted[c.n / 2]
    } else {
        0.5 * (sorted[c.n / 2 - 1] + sorted[c.n / 2])
    };
    let bits: Vec<u8> = c.x.iter().map(|&v| (v > median) as u8).collect();
    lz76(&bits) as f64 * (c.n as f64).log2() / c.n as f64
}

fn band_binary(c: &Ctx) -> Vec<bool> {
    let thr = 0.2 * c.max_abs;
    c.x.iter().map(|&v| v.abs() >= thr).collect()
}

/// Variance of the maximal-run lengths of the binary envelope
/// b = (|x| ≥ 0.2·max|x|).
pub(crate) fn cv_bin(c: &Ctx) -> f64 {
    let b = band_binary(c);
    let mut runs: Vec<f64> = Vec::new();
    let mut len = 1usize;
    for i in 1..b.len() {
        if b[i] == b[i - 1] {
            len += 1;
        } else {
            runs.push(len as f64);
            len = 1;
        }
    }
    runs.push(len as f64);
    let mu = runs.iter().sum::<f64>() / runs.len() as f64;
    runs.iter().map(|&r| (r - mu) * (r - mu)).sum::<f64>() / runs.len() as f64
}

/// Duty cycle of the binary envelope.
pub(crate) fn area(c: &Ctx) -> f64 {
    let b = band_binary(c);
    b.iter().filter(|&&v| v).count() as f64 / c.n as f64
}

/// 0→1 transitions of the binary envelope per second.
pub(crate) fn frq(c: &Ctx) -> f64 {
    let b = band_binary(c);
    let transitions = (1..b.len()).filter(|&i| !b[i - 1] && b[i]).count();
    transitions as f64 / (c.n as f64 / c.fs)
}

/// Kurtosis E[(x−μ)⁴]/σ⁴ (plain, not excess); 0 for a flat signal.
pub(crate) fn kurtosis(c: &Ctx) -> f64 {
    if c.std == 0.0 {
        return 0.0;
    }
    let m4 = c
        .x
        .iter()
        .map(|&v| {
            let d = v - c.mean;
            d * d * d * d
        })
        .sum::<f64>()
        / c.n as f64;
    m4 / (c.std * c.std * c.std * c.std)
}
