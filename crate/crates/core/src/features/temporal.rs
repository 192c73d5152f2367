//! Temporal features: threshold-crossing statistics, windowed amplitude
//! summaries and exponential-envelope crossing counts.

use super::{mean, subwindows, Ctx};

/// Threshold crossing interval: mean gap (ms) between upward crossings of
/// `0.2·max|x|`, taken per 1-s window and averaged over windows that contain
/// at least two crossings.
pub(crate) fn tci(c: &Ctx) -> f64 {
    let thr = 0.2 * c.max_abs;
    let w = c.fs.round() as usize;
    let mut window_means = Vec::new();
    for r in subwindows(c.n, w) {
        let mut last: Option<usize> = None;
        let mut gaps_ms = Vec::new();
        for i in r.start.max(1)..r.end {
            if c.x[i - 1] < thr && c.x[i] >= thr {
                if let Some(prev) = last {
                    gaps_ms.push((i - prev) as f64 * 1000.0 / c.fs);
                }
                last = Some(i);
            }
        }
        if !gaps_ms.is_empty() {
            window_means.push(mean(&gaps_ms));
        }
    }
    mean(&window_means)
}

/// Threshold crossing sample count: per 3-s window, normalize to unit peak
/// and take the fraction of samples with |x| > 0.2; average over windows.
pub(crate) fn tcsc(c: &Ctx) -> f64 {
    let w = (3.0 * c.fs).round() as usize;
    let mut fracs = Vec::new();
    for r in subwindows(c.n, w) {
        let seg = &c.x[r];
        let peak = seg.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
        if peak == 0.0 {
            fracs.push(0.0);
            continue;
        }
        let count = seg.iter().filter(|&&v| (v / peak).abs() > 0.2).count();
        fracs.push(count as f64 / seg.len() as f64);
    }
    mean(&fracs)
}

/// Mean absolute value over 2-s windows, averaged.
pub(crate) fn mav(c: &Ctx) -> f64 {
    let w = (2.0 * c.fs).round() as usize;
    let per_window: Vec<f64> = subwindows(c.n, w)
        .into_iter()
        .map(|r| {
            let seg = &c.x[r];
            seg.iter().map(|v| v.abs()).sum::<f64>() / seg.len() as f64
        })
        .collect();
    mean(&per_window)
}

/// Standard exponential: crossings between the signal and a fixed decaying
/// envelope anchored at the global peak, time constant 3 s.
pub(crate) fn ste(c: &Ctx) -> f64 {
    envelope_crossings(c, false)
}

/// Modified exponential: like [`ste`], but the envelope is re-anchored at
/// every local maximum of |x| that pokes above it.
pub(crate) fn mea(c: &Ctx) -> f64 {
    envelope_crossings(c, true)
}

fn envelope_crossings(c: &Ctx, relift: bool) -> f64 {
    let x = c.x;
    let n = c.n;
    let tau = 3.0 * c.fs;
    // First sample attaining the global |x| maximum anchors the envelope.
    let i_peak = x.iter().position(|v| v.abs() == c.max_abs).unwrap_or(0);
    let mut anchor_amp = c.max_abs;
    let mut anchor_idx = i_peak as f64;
    let mut crossings = 0usize;
    let mut prev_d = 0.0f64;
    for i in 0..n {
        let env = anchor_amp * (-((i as f64 - anchor_idx) / tau)).exp();
        let d = x[i] - env;
        if i > 0 && prev_d * d < 0.0 {
            crossings += 1;
        }
        prev_d = d;
        if relift {
            let v = x[i].abs();
            let left_ok = i == 0 || v >= x[i - 1].abs();
            let right_ok = i == n - 1 || v >= x[i + 1].abs();
            if left_ok && right_ok && v > env {
                anchor_amp = v;
                anchor_idx = i as f64;
            }
        }
    }
    crossings as f64
}

/// Band collapse proxy: fraction of samples whose centered 0.5-s window max
/// of |x| stays below a quarter of the global peak.
pub(crate) fn bcp(c: &Ctx) -> f64 {
    let w = (0.5 * c.fs).round() as usize;
    let half = w / 2;
    let thr = 0.25 * c.max_abs;
    let mut count = 0usize;
    for i in 0..c.n {
        let lo = i.saturating_sub(half);
        let hi = (i + half + 1).min(c.n);
        let wmax = c.x[lo..hi].iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
        if wmax < thr {
            count += 1;
        }
    }
    count as f64 / c.n as f64
}

/// Fraction of samples with |x| ≥ 0.5·max|x|.
pub(crate) fn count1(c: &Ctx) -> f64 {
    let thr = 0.5 * c.max_abs;
    fraction(c, |a, _| a >= thr)
}

/// Fraction of samples with |x| ≥ mean|x|.
pub(crate) fn count2(c: &Ctx) -> f64 {
    fraction(c, |a, md| a >= md)
}

/// Fraction of samples with mean|x| ≤ |x| ≤ 0.5·max|x|.
pub(crate) fn count3(c: &Ctx) -> f64 {
    let thr = 0.5 * c.max_abs;
    fraction(c, |a, md| a >= md && a <= thr)
}

fn fraction(c: &Ctx, keep: impl Fn(f64, f64) -> bool) -> f64 {
    let md = c.x.iter().map(|v| v.abs()).sum::<f64>() / c.n as f64;
    let count = c.x.iter().filter(|&&v| keep(v.abs(), md)).count();
    count as f64 / c.n as f64
}
