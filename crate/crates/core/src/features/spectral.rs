//! Spectral features over the one-sided amplitude spectrum of the
//! Hamming-windowed segment (plus the time-domain VF-filter leakage).
//!
//! Band edges are inclusive. Several features are relative to the peak
//! frequency `F` — the amplitude argmax on [0.5, 30] Hz (lowest bin wins
//! ties); an empty or all-zero band makes every `F`-dependent feature 0.

use super::Ctx;

const BAND_LO: f64 = 0.5;
const BAND_HI: f64 = 30.0;

/// Peak bin and frequency on [0.5, 30] Hz, or `None` if the band holds no
/// positive amplitude.
fn peak(c: &Ctx) -> Option<(usize, f64)> {
    let mut best: Option<usize> = None;
    for k in 0..c.amp.len() {
        let f = c.freq(k);
        if f < BAND_LO || f > BAND_HI {
            continue;
        }
        if best.map_or(true, |b| c.amp[k] > c.amp[b]) {
            best = Some(k);
        }
    }
    let k = best?;
    if c.amp[k] <= 0.0 {
        return None;
    }
    Some((k, c.freq(k)))
}

fn amp_sum(c: &Ctx, lo: f64, hi: f64) -> f64 {
    (0..c.amp.len())
        .filter(|&k| {
            let f = c.freq(k);
            f >= lo && f <= hi
        })
        .map(|k| c.amp[k])
        .sum()
}

fn power_sum(c: &Ctx, lo: f64, hi: f64) -> f64 {
    (0..c.amp.len())
        .filter(|&k| {
            let f = c.freq(k);
            f >= lo && f <= hi
        })
        .map(|k| c.amp[k] * c.amp[k])
        .sum()
}

/// VF-filter leakage: residue after a half-estimated-period shift-and-add,
/// with the period proxy T = π·Σ|x| / Σ|Δx|.
pub(crate) fn vf_leak(c: &Ctx) -> f64 {
    let x = c.x;
    let n = c.n;
    if n < 2 {
        return 0.0;
    }
    let sum_abs: f64 = x.iter().map(|v| v.abs()).sum();
    let sum_diff: f64 = x.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    if sum_diff == 0.0 {
        return 0.0;
    }
    let t = std::f64::consts::PI * sum_abs / sum_diff;
    let shift = ((t / 2.0).round() as usize).clamp(1, n - 1);
    let mut num = 0.0;
    let mut den = 0.0;
    for i in shift..n {
        num += (x[i] + x[i - shift]).abs();
        den += x[i].abs() + x[i - shift].abs();
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Normalized first spectral moment: Σ a·f / (F·Σ a) over [0, min(20F, 100)].
pub(crate) fn m_factor(c: &Ctx) -> f64 {
    let Some((_, f_peak)) = peak(c) else { return 0.0 };
    let bound = (20.0 * f_peak).min(100.0);
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..c.amp.len() {
        let f = c.freq(k);
        if f <= bound {
            num += c.amp[k] * f;
            den += c.amp[k];
        }
    }
    if den == 0.0 {
        0.0
    } else {
        num / (f_peak * den)
    }
}

/// Amplitude share of the band [0.7F, 1.4F] within [0.5, 30] Hz.
pub(crate) fn a2(c: &Ctx) -> f64 {
    let Some((_, f_peak)) = peak(c) else { return 0.0 };
    let den = amp_sum(c, BAND_LO, BAND_HI);
    if den == 0.0 {
        0.0
    } else {
        amp_sum(c, 0.7 * f_peak, 1.4 * f_peak) / den
    }
}

/// Spectral centroid on [0, 30] Hz.
pub(crate) fn centroid(c: &Ctx) -> f64 {
    centroid_upto30(c).unwrap_or(0.0)
}

fn centroid_upto30(c: &Ctx) -> Option<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..c.amp.len() {
        let f = c.freq(k);
        if f <= BAND_HI {
            num += c.amp[k] * f;
            den += c.amp[k];
        }
    }
    if den == 0.0 {
        None
    } else {
        Some(num / den)
    }
}

/// Power share of [4, 10] Hz within [0.5, 30] Hz.
pub(crate) fn psa(c: &Ctx) -> f64 {
    let den = power_sum(c, BAND_LO, BAND_HI);
    if den == 0.0 {
        0.0
    } else {
        power_sum(c, 4.0, 10.0) / den
    }
}

/// Power share of the 1-Hz band centered on the peak, relative to the whole
/// one-sided spectrum.
pub(crate) fn center_power(c: &Ctx) -> f64 {
    let Some((_, f_peak)) = peak(c) else { return 0.0 };
    let total: f64 = c.amp.iter().map(|a| a * a).sum();
    if total == 0.0 {
        0.0
    } else {
        power_sum(c, f_peak - 0.5, f_peak + 0.5) / total
    }
}

/// Amplitude-weighted spectral bandwidth around the [0, 30] Hz centroid.
pub(crate) fn bwt(c: &Ctx) -> f64 {
    let Some(center) = centroid_upto30(c) else { return 0.0 };
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..c.amp.len() {
        let f = c.freq(k);
        if f <= BAND_HI {
            num += c.amp[k] * (f - center) * (f - center);
            den += c.amp[k];
        }
    }
    (num / den).sqrt()
}

/// Width of the smallest band around the peak holding half the total
/// one-sided amplitude, grown greedily toward the larger neighbor bin
/// (ties toward lower frequency).
pub(crate) fn bw(c: &Ctx) -> f64 {
    let Some((k_peak, _)) = peak(c) else { return 0.0 };
    let total: f64 = c.amp.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let target = 0.5 * total;
    let mut lo = k_peak;
    let mut hi = k_peak;
    let mut acc = c.amp[k_peak];
    while acc < target {
        let left = (lo > 0).then(|| c.amp[lo - 1]);
        let right = (hi + 1 < c.amp.len()).then(|| c.amp[hi + 1]);
        match (left, right) {
            (Some(l), Some(r)) if l >= r => {
                lo -= 1;
                acc += l;
            }
            (Some(_), Some(r)) => {
                hi += 1;
                acc += r;
            }
            (Some(l), None) => {
                lo -= 1;
                acc += l;
            }
            (None, Some(r)) => {
                hi += 1;
                acc += r;
            }
            (None, None) => break,
        }
    }
    (hi - lo + 1) as f64 * (c.fs / c.n as f64)
}

/// Spectral flatness (geometric / arithmetic mean) of the power on
/// [0.5, 30] Hz; any exactly-zero bin collapses the geometric mean to 0.
pub(crate) fn li(c: &Ctx) -> f64 {
    let p: Vec<f64> = (0..c.amp.len())
        .filter(|&k| {
            let f = c.freq(k);
            f >= BAND_LO && f <= BAND_HI
        })
        .map(|k| c.amp[k] * c.amp[k])
        .collect();
    if p.is_empty() {
        return 0.0;
    }
    let am = p.iter().sum::<f64>() / p.len() as f64;
    if am == 0.0 || p.iter().any(|&v| v == 0.0) {
        return 0.0;
    }
    let gm = (p.iter().map(|v| v.ln()).sum::<f64>() / p.len() as f64).exp();
    gm / am
}
