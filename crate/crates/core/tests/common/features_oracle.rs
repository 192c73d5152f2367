//! Independent reference implementations of the 31 features, written as
//! plain loops directly from the formula ledger, with a naive O(n²) DFT
//! instead of the library FFT. Nothing here calls into the crate's feature
//! or spectrum code — agreement between the two stacks is the test.

use std::f64::consts::PI;

/// All 31 features of one signal, in registry order.
pub fn oracle_features(x: &[f64], fs: f64) -> Vec<f64> {
    let amp = dft_amplitude_hamming(x);
    vec![
        tci(x, fs),
        tcsc(x, fs),
        mav(x, fs),
        envelope_crossings(x, fs, false),
        envelope_crossings(x, fs, true),
        bcp(x, fs),
        count1(x),
        count2(x),
        count3(x),
        vf_leak(x),
        m_factor(x, fs, &amp),
        a2(x, fs, &amp),
        centroid(x, fs, &amp),
        psa(x, fs, &amp),
        center_power(x, fs, &amp),
        bwt(x, fs, &amp),
        bw(x, fs, &amp),
        li(x, fs, &amp),
        psr(x, fs),
        hilb(x),
        cm(x),
        cv_bin(x),
        area(x),
        frq(x, fs),
        kurtosis(x),
        disp_en(x),
        samp_en(x),
        energy(x),
        renyi_en(x),
        fuzzy_en(x),
        wavelet_en(x),
    ]
}

/// Registry ids in the order `oracle_features` emits them.
pub const ORACLE_ORDER: [&str; 31] = [
    "tci", "tcsc", "mav", "ste", "mea", "bcp", "count1", "count2", "count3", "vf_leak", "m",
    "a2", "centroid", "psa", "center_power", "bwt", "bw", "li", "psr", "hilb", "cm", "cv_bin",
    "area", "frq", "kurtosis", "disp_en", "samp_en", "energy", "renyi_en", "fuzzy_en",
    "wavelet_en",
];

fn max_abs(x: &[f64]) -> f64 {
    let mut m = 0.0f64;
    for &v in x {
        if v.abs() > m {
            m = v.abs();
        }
    }
    m
}

fn mean_of(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let mut s = 0.0;
    for &a in v {
        s += a;
    }
    s / v.len() as f64
}

/// Full non-overlapping windows; the whole signal if it is shorter than one.
fn windows(n: usize, w: usize) -> Vec<(usize, usize)> {
    if n < w || w == 0 {
        return vec![(0, n)];
    }
    (0..n / w).map(|k| (k * w, (k + 1) * w)).collect()
}

// ---------------------------------------------------------------- temporal

fn tci(x: &[f64], fs: f64) -> f64 {
    let thr = 0.2 * max_abs(x);
    let mut per_window = Vec::new();
    for (lo, hi) in windows(x.len(), fs.round() as usize) {
        let mut crossings = Vec::new();
        for i in lo.max(1)..hi {
            if x[i - 1] < thr && x[i] >= thr {
                crossings.push(i);
            }
        }
        if crossings.len() >= 2 {
            let mut gaps = Vec::new();
            for p in 1..crossings.len() {
                gaps.push((crossings[p] - crossings[p - 1]) as f64 * 1000.0 / fs);
            }
            per_window.push(mean_of(&gaps));
        }
    }
    mean_of(&per_window)
}

fn tcsc(x: &[f64], fs: f64) -> f64 {
    let mut per_window = Vec::new();
    for (lo, hi) in windows(x.len(), (3.0 * fs).round() as usize) {
        let peak = max_abs(&x[lo..hi]);
        if peak == 0.0 {
            per_window.push(0.0);
            continue;
        }
        let mut count = 0usize;
        for &v in &x[lo..hi] {
            if (v / peak).abs() > 0.2 {
                count += 1;
            }
        }
        per_window.push(count as f64 / (hi - lo) as f64);
    }
    mean_of(&per_window)
}

fn mav(x: &[f64], fs: f64) -> f64 {
    let mut per_window = Vec::new();
    for (lo, hi) in windows(x.len(), (2.0 * fs).round() as usize) {
        let mut s = 0.0;
        for &v in &x[lo..hi] {
            s += v.abs();
        }
        per_window.push(s / (hi - lo) as f64);
    }
    mean_of(&per_window)
}

fn envelope_crossings(x: &[f64], fs: f64, relift: bool) -> f64 {
    let n = x.len();
    let peak = max_abs(x);
    let mut i_peak = 0;
    for (i, &v) in x.iter().enumerate() {
        if v.abs() == peak {
            i_peak = i;
            break;
        }
    }
    let tau = 3.0 * fs;
    let mut amp = peak;
    let mut anchor = i_peak as f64;
    let mut count = 0;
    let mut prev = 0.0;
    for i in 0..n {
        let env = amp * (-((i as f64 - anchor) / tau)).exp();
        let d = x[i] - env;
        if i > 0 && prev * d < 0.0 {
            count += 1;
        }
        prev = d;
        if relift {
            let v = x[i].abs();
            let left = i == 0 || v >= x[i - 1].abs();
            let right = i == n - 1 || v >= x[i + 1].abs();
            if left && right && v > env {
                amp = v;
                anchor = i as f64;
            }
        }
    }
    count as f64
}

fn bcp(x: &[f64], fs: f64) -> f64 {
    let n = x.len();
    let half = ((0.5 * fs).round() as usize) / 2;
    let thr = 0.25 * max_abs(x);
    let mut count = 0;
    for i in 0..n {
        let lo = i.saturating_sub(half);
        let hi = if i + half + 1 < n { i + half + 1 } else { n };
        if max_abs(&x[lo..hi]) < thr {
            count += 1;
        }
    }
    count as f64 / n as f64
}

fn count1(x: &[f64]) -> f64 {
    let thr = 0.5 * max_abs(x);
    let mut c = 0;
    for &v in x {
        if v.abs() >= thr {
            c += 1;
        }
    }
    c as f64 / x.len() as f64
}

fn count2(x: &[f64]) -> f64 {
    let md = {
        let mut s = 0.0;
        for &v in x {
            s += v.abs();
        }
        s / x.len() as f64
    };
    let mut c = 0;
    for &v in x {
        if v.abs() >= md {
            c += 1;
        }
    }
    c as f64 / x.len() as f64
}

fn count3(x: &[f64]) -> f64 {
    let md = {
        let mut s = 0.0;
        for &v in x {
            s += v.abs();
        }
        s / x.len() as f64
    };
    let thr = 0.5 * max_abs(x);
    let mut c = 0;
    for &v in x {
        if v.abs() >= md && v.abs() <= thr {
            c += 1;
        }
    }
    c as f64 / x.len() as f64
}

// ---------------------------------------------------------------- spectral

/// One-sided amplitude spectrum of the Hamming-windowed signal via a naive
/// DFT with modular angle reduction.
pub fn dft_amplitude_hamming(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut windowed = Vec::with_capacity(n);
    for (i, &v) in x.iter().enumerate() {
        let w = if n == 1 {
            1.0
        } else {
            0.54 - 0.46 * (2.0 * PI * i as f64 / (n - 1) as f64).cos()
        };
        windowed.push(v * w);
    }
    let mut amp = Vec::with_capacity(n / 2 + 1);
    for k in 0..=n / 2 {
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, &v) in windowed.iter().enumerate() {
            let ang = -2.0 * PI * ((k * i) % n) as f64 / n as f64;
            re += v * ang.cos();
            im += v * ang.sin();
        }
        amp.push((re * re + im * im).sqrt());
    }
    amp
}

fn bin_f(k: usize, n: usize, fs: f64) -> f64 {
    k as f64 * fs / n as f64
}

fn peak_in_band(x: &[f64], fs: f64, amp: &[f64]) -> Option<(usize, f64)> {
    let n = x.len();
    let mut best: Option<usize> = None;
    for k in 0..amp.len() {
        let f = bin_f(k, n, fs);
        if !(0.5..=30.0).contains(&f) {
            continue;
        }
        if best.is_none() || amp[k] > amp[best.unwrap()] {
            best = Some(k);
        }
    }
    let k = best?;
    if amp[k] <= 0.0 {
        None
    } else {
        Some((k, bin_f(k, n, fs)))
    }
}

fn vf_leak(x: &[f64]) -> f64 {
    let n = x.len();
    if n < 2 {
        return 0.0;
    }
    let mut sum_abs = 0.0;
    for &v in x {
        sum_abs += v.abs();
    }
    let mut sum_diff = 0.0;
    for i in 1..n {
        sum_diff += (x[i] - x[i - 1]).abs();
    }
    if sum_diff == 0.0 {
        return 0.0;
    }
    let t = PI * sum_abs / sum_diff;
    let mut shift = (t / 2.0).round() as usize;
    if shift < 1 {
        shift = 1;
    }
    if shift > n - 1 {
        shift = n - 1;
    }
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

fn m_factor(x: &[f64], fs: f64, amp: &[f64]) -> f64 {
    let Some((_, f_peak)) = peak_in_band(x, fs, amp) else { return 0.0 };
    let bound = if 20.0 * f_peak < 100.0 { 20.0 * f_peak } else { 100.0 };
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..amp.len() {
        let f = bin_f(k, x.len(), fs);
        if f <= bound {
            num += amp[k] * f;
            den += amp[k];
        }
    }
    if den == 0.0 {
        0.0
    } else {
        num / (f_peak * den)
    }
}

fn band_amp_sum(x: &[f64], fs: f64, amp: &[f64], lo: f64, hi: f64) -> f64 {
    let mut s = 0.0;
    for k in 0..amp.len() {
        let f = bin_f(k, x.len(), fs);
        if f >= lo && f <= hi {
            s += amp[k];
        }
    }
    s
}

fn band_pow_sum(x: &[f64], fs: f64, amp: &[f64], lo: f64, hi: f64) -> f64 {
    let mut s = 0.0;
    for k in 0..amp.len() {
        let f = bin_f(k, x.len(), fs);
        if f >= lo && f <= hi {
            s += amp[k] * amp[k];
        }
    }
    s
}

fn a2(x: &[f64], fs: f64, amp: &[f64]) -> f64 {
    let Some((_, f_peak)) = peak_in_band(x, fs, amp) else { return 0.0 };
    let den = band_amp_sum(x, fs, amp, 0.5, 30.0);
    if den == 0.0 {
        0.0
    } else {
        band_amp_sum(x, fs, amp, 0.7 * f_peak, 1.4 * f_peak) / den
    }
}

fn centroid(x: &[f64], fs: f64, amp: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..amp.len() {
        let f = bin_f(k, x.len(), fs);
        if f <= 30.0 {
            num += amp[k] * f;
            den += amp[k];
        }
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn psa(x: &[f64], fs: f64, amp: &[f64]) -> f64 {
    let den = band_pow_sum(x, fs, amp, 0.5, 30.0);
    if den == 0.0 {
        0.0
    } else {
        band_pow_sum(x, fs, amp, 4.0, 10.0) / den
    }
}

fn center_power(x: &[f64], fs: f64, amp: &[f64]) -> f64 {
    let Some((_, f_peak)) = peak_in_band(x, fs, amp) else { return 0.0 };
    let mut total = 0.0;
    for &a in amp {
        total += a * a;
    }
    if total == 0.0 {
        0.0
    } else {
        band_pow_sum(x, fs, amp, f_peak - 0.5, f_peak + 0.5) / total
    }
}

fn bwt(x: &[f64], fs: f64, amp: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..amp.len() {
        let f = bin_f(k, x.len(), fs);
        if f <= 30.0 {
            den += amp[k];
        }
    }
    if den == 0.0 {
        return 0.0;
    }
    let center = centroid(x, fs, amp);
    for k in 0..amp.len() {
        let f = bin_f(k, x.len(), fs);
        if f <= 30.0 {
            num += amp[k] * (f - center) * (f - center);
        }
    }
    (num / den).sqrt()
}

fn bw(x: &[f64], fs: f64, amp: &[f64]) -> f64 {
    let Some((k_peak, _)) = peak_in_band(x, fs, amp) else { return 0.0 };
    let mut total = 0.0;
    for &a in amp {
        total += a;
    }
    if total <= 0.0 {
        return 0.0;
    }
    let mut lo = k_peak;
    let mut hi = k_peak;
    let mut acc = amp[k_peak];
    while acc < 0.5 * total {
        let can_left = lo > 0;
        let can_right = hi + 1 < amp.len();
        if can_left && can_right {
            if amp[lo - 1] >= amp[hi + 1] {
                lo -= 1;
                acc += amp[lo];
            } else {
                hi += 1;
                acc += amp[hi];
            }
        } else if can_left {
            lo -= 1;
            acc += amp[lo];
        } else if can_right {
            hi += 1;
            acc += amp[hi];
        } else {
            break;
        }
    }
    (hi - lo + 1) as f64 * (fs / x.len() as f64)
}

fn li(x: &[f64], fs: f64, amp: &[f64]) -> f64 {
    let mut powers = Vec::new();
    for k in 0..amp.len() {
        let f = bin_f(k, x.len(), fs);
        if (0.5..=30.0).contains(&f) {
            powers.push(amp[k] * amp[k]);
        }
    }
    if powers.is_empty() {
        return 0.0;
    }
    let am = mean_of(&powers);
    if am == 0.0 {
        return 0.0;
    }
    let mut log_sum = 0.0;
    for &p in &powers {
        if p == 0.0 {
            return 0.0;
        }
        log_sum += p.ln();
    }
    (log_sum / powers.len() as f64).exp() / am
}

// -------------------------------------------------------------- complexity

fn grid_index(v: f64, lo: f64, range: f64) -> usize {
    if range <= 0.0 {
        return 0;
    }
    let idx = ((v - lo) / range * 40.0).floor() as usize;
    if idx > 39 {
        39
    } else {
        idx
    }
}

/// Axis rule shared with the implementation's pinned definition: a spread
/// below 1e-9 of the joint plane scale counts as flat.
fn grid_axis(v: &[f64], plane_scale: f64) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &a in v {
        if a < lo {
            lo = a;
        }
        if a > hi {
            hi = a;
        }
    }
    if hi - lo <= 1e-9 * plane_scale {
        (lo, 0.0)
    } else {
        (lo, hi - lo)
    }
}

fn psr(x: &[f64], fs: f64) -> f64 {
    let n = x.len();
    let delay = (0.5 * fs).round() as usize;
    if n <= delay {
        return 0.0;
    }
    let (lo, range) = grid_axis(x, max_abs(x));
    let mut seen = vec![false; 1600];
    for i in 0..n - delay {
        seen[grid_index(x[i], lo, range) * 40 + grid_index(x[i + delay], lo, range)] = true;
    }
    let mut c = 0;
    for &s in &seen {
        if s {
            c += 1;
        }
    }
    c as f64 / 1600.0
}

/// Imaginary part of the analytic signal via naive DFT + inverse DFT.
fn naive_hilbert(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut re = vec![0.0; n];
    let mut im = vec![0.0; n];
    for k in 0..n {
        let mut sr = 0.0;
        let mut si = 0.0;
        for (i, &v) in x.iter().enumerate() {
            let ang = -2.0 * PI * ((k * i) % n) as f64 / n as f64;
            sr += v * ang.cos();
            si += v * ang.sin();
        }
        re[k] = sr;
        im[k] = si;
    }
    for k in 0..n {
        let weight = if k == 0 || (n % 2 == 0 && k == n / 2) {
            1.0
        } else if k < n / 2 || (n % 2 == 1 && k == n / 2) {
            2.0
        } else {
            0.0
        };
        re[k] *= weight;
        im[k] *= weight;
    }
    let mut out = vec![0.0; n];
    for (i, o) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for k in 0..n {
            let ang = 2.0 * PI * ((k * i) % n) as f64 / n as f64;
            s += re[k] * ang.sin() + im[k] * ang.cos();
        }
        *o = s / n as f64;
    }
    out
}

fn hilb(x: &[f64]) -> f64 {
    let h = naive_hilbert(x);
    let plane_scale = if max_abs(x) > max_abs(&h) { max_abs(x) } else { max_abs(&h) };
    let (xlo, xrange) = grid_axis(x, plane_scale);
    let (ylo, yrange) = grid_axis(&h, plane_scale);
    let mut seen = vec![false; 1600];
    for i in 0..x.len() {
        seen[grid_index(x[i], xlo, xrange) * 40 + grid_index(h[i], ylo, yrange)] = true;
    }
    let mut c = 0;
    for &s in &seen {
        if s {
            c += 1;
        }
    }
    c as f64 / 1600.0
}

/// LZ76 phrase count by definition: each phrase extends while it remains a
/// substring of everything before its last character.
pub fn lz76_by_parsing(s: &[u8]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let mut count = 0;
    let mut p = 0;
    while p < n {
        let mut k = 1;
        while p + k <= n {
            let phrase = &s[p..p + k];
            let history = &s[..p + k - 1];
            let reproducible =
                history.len() >= k && history.windows(k).any(|w| w == phrase);
            if !reproducible {
                break;
            }
            k += 1;
        }
        let k = if p + k > n { n - p } else { k };
        count += 1;
        p += k;
    }
    count
}

fn cm(x: &[f64]) -> f64 {
    let n = x.len();
    if n < 2 {
        return 0.0;
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let mut bits = Vec::with_capacity(n);
    for &v in x {
        bits.push(u8::from(v > median));
    }
    lz76_by_parsing(&bits) as f64 * (n as f64).log2() / n as f64
}

fn band_bits(x: &[f64]) -> Vec<bool> {
    let thr = 0.2 * max_abs(x);
    let mut b = Vec::with_capacity(x.len());
    for &v in x {
        b.push(v.abs() >= thr);
    }
    b
}

fn cv_bin(x: &[f64]) -> f64 {
    let b = band_bits(x);
    let mut runs = Vec::new();
    let mut len = 1;
    for i in 1..b.len() {
        if b[i] == b[i - 1] {
            len += 1;
        } else {
            runs.push(len as f64);
            len = 1;
        }
    }
    runs.push(len as f64);
    let mu = mean_of(&runs);
    let mut var = 0.0;
    for &r in &runs {
        var += (r - mu) * (r - mu);
    }
    var / runs.len() as f64
}

fn area(x: &[f64]) -> f64 {
    let b = band_bits(x);
    let mut c = 0;
    for &v in &b {
        if v {
            c += 1;
        }
    }
    c as f64 / b.len() as f64
}

fn frq(x: &[f64], fs: f64) -> f64 {
    let b = band_bits(x);
    let mut c = 0;
    for i in 1..b.len() {
        if !b[i - 1] && b[i] {
            c += 1;
        }
    }
    c as f64 / (x.len() as f64 / fs)
}

fn kurtosis(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mu = mean_of(x);
    let mut var = 0.0;
    for &v in x {
        var += (v - mu) * (v - mu);
    }
    var /= n;
    if var == 0.0 {
        return 0.0;
    }
    let mut m4 = 0.0;
    for &v in x {
        let d = v - mu;
        m4 += d * d * d * d;
    }
    m4 /= n;
    m4 / (var * var)
}

// ----------------------------------------------------------------- entropy

fn disp_en(x: &[f64]) -> f64 {
    let n = x.len();
    if n < 2 {
        return 0.0;
    }
    let mu = mean_of(x);
    let mut var = 0.0;
    for &v in x {
        var += (v - mu) * (v - mu);
    }
    let sd = (var / n as f64).sqrt();
    if sd == 0.0 {
        return 0.0;
    }
    let mut classes = Vec::with_capacity(n);
    for &v in x {
        let z = 0.5 * (1.0 + libm::erf((v - mu) / sd / (2.0f64).sqrt()));
        let mut cls = (6.0 * z + 0.5).round() as i64;
        if cls < 1 {
            cls = 1;
        }
        if cls > 6 {
            cls = 6;
        }
        classes.push(cls as usize);
    }
    let mut counts = vec![0usize; 36];
    for i in 1..n {
        counts[(classes[i - 1] - 1) * 6 + (classes[i] - 1)] += 1;
    }
    let total = (n - 1) as f64;
    let mut h = 0.0;
    for &c in &counts {
        if c > 0 {
            let p = c as f64 / total;
            h -= p * p.ln();
        }
    }
    h / (36.0f64).ln()
}

fn samp_en(x: &[f64]) -> f64 {
    let n = x.len();
    let mu = mean_of(x);
    let mut var = 0.0;
    for &v in x {
        var += (v - mu) * (v - mu);
    }
    let r = 0.2 * (var / n as f64).sqrt();
    let m = 2;
    if r <= 0.0 || n < m + 2 {
        return 0.0;
    }
    let t = n - m;
    let mut b_count = 0u64;
    let mut a_count = 0u64;
    for i in 0..t {
        for j in i + 1..t {
            let mut dm = 0.0f64;
            for off in 0..m {
                let d = (x[i + off] - x[j + off]).abs();
                if d > dm {
                    dm = d;
                }
            }
            if dm <= r {
                b_count += 1;
                let d = (x[i + m] - x[j + m]).abs();
                let dm1 = if d > dm { d } else { dm };
                if dm1 <= r {
                    a_count += 1;
                }
            }
        }
    }
    if a_count == 0 || b_count == 0 {
        0.0
    } else {
        -((a_count as f64 / b_count as f64).ln())
    }
}

fn energy(x: &[f64]) -> f64 {
    let mut s = 0.0;
    for &v in x {
        s += v * v;
    }
    s
}

fn renyi_en(x: &[f64]) -> f64 {
    let n = x.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in x {
        if v < lo {
            lo = v;
        }
        if v > hi {
            hi = v;
        }
    }
    let range = hi - lo;
    let mut counts = vec![0u64; 64];
    for &v in x {
        let idx = if range <= 0.0 {
            0
        } else {
            let i = ((v - lo) / range * 64.0).floor() as usize;
            if i > 63 {
                63
            } else {
                i
            }
        };
        counts[idx] += 1;
    }
    let mut s = 0.0;
    for &c in &counts {
        let p = c as f64 / n as f64;
        s += p * p;
    }
    -s.ln()
}

fn fuzzy_en(x: &[f64]) -> f64 {
    let n = x.len();
    let mu = mean_of(x);
    let mut var = 0.0;
    for &v in x {
        var += (v - mu) * (v - mu);
    }
    let r = 0.2 * (var / n as f64).sqrt();
    let m = 2;
    if r <= 0.0 || n < m + 2 {
        return 0.0;
    }
    let t = n - m;
    let mut phi_m = 0.0;
    let mut phi_m1 = 0.0;
    for i in 0..t {
        for j in i + 1..t {
            let mut dm = 0.0f64;
            for off in 0..m {
                let d = (x[i + off] - x[j + off]).abs();
                if d > dm {
                    dm = d;
                }
            }
            phi_m += (-(dm / r) * (dm / r)).exp();
            let d = (x[i + m] - x[j + m]).abs();
            let dm1 = if d > dm { d } else { dm };
            phi_m1 += (-(dm1 / r) * (dm1 / r)).exp();
        }
    }
    if phi_m <= 0.0 || phi_m1 <= 0.0 {
        0.0
    } else {
        -((phi_m1 / phi_m).ln())
    }
}

fn wavelet_en(x: &[f64]) -> f64 {
    let root2 = (2.0f64).sqrt();
    let mut level = x.to_vec();
    let mut energies = Vec::new();
    for _ in 0..5 {
        let pairs = level.len() / 2;
        let mut next = Vec::with_capacity(pairs);
        let mut e = 0.0;
        for k in 0..pairs {
            let a = (level[2 * k] + level[2 * k + 1]) / root2;
            let d = (level[2 * k] - level[2 * k + 1]) / root2;
            next.push(a);
            e += d * d;
        }
        energies.push(e);
        level = next;
    }
    let mut e = 0.0;
    for &v in &level {
        e += v * v;
    }
    energies.push(e);
    let mut total = 0.0;
    for &v in &energies {
        total += v;
    }
    if total <= 0.0 {
        return 0.0;
    }
    let mut h = 0.0;
    for &v in &energies {
        if v > 0.0 {
            let p = v / total;
            h -= p * p.ln();
        }
    }
    h
}
