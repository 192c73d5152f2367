//! FFT plumbing shared by the decomposition and the spectral features: a
//! thread-local planner, forward/inverse transforms, one-sided power spectra
//! and the FFT-based analytic signal.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use std::cell::RefCell;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place forward FFT (unnormalized, like the underlying library).
pub fn fft_in_place(buf: &mut [Complex<f64>]) {
    PLANNER.with(|p| {
        let fft = p.borrow_mut().plan_fft_forward(buf.len());
        fft.process(buf);
    });
}

/// In-place inverse FFT, normalized by 1/n so `ifft(fft(x)) == x`.
pub fn ifft_in_place(buf: &mut [Complex<f64>]) {
    let n = buf.len();
    PLANNER.with(|p| {
        let fft = p.borrow_mut().plan_fft_inverse(n);
        fft.process(buf);
    });
    let scale = 1.0 / n as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// Forward FFT of a real signal.
pub fn fft_real(x: &[f64]) -> Vec<Complex<f64>> {
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft_in_place(&mut buf);
    buf
}

/// Frequency of FFT bin `i` for an `n`-point transform at rate `fs`,
/// over the one-sided range `0..=n/2`.
pub fn bin_freq(i: usize, n: usize, fs: f64) -> f64 {
    i as f64 * fs / n as f64
}

/// Symmetric Hamming window of length `n` (matches the `hamming(n, 'symmetric')`
/// convention: endpoints 0.08).
pub fn hamming(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|i| 0.54 - 0.46 * (2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64).cos())
        .collect()
}

/// One-sided power spectrum |X_i|² for bins `0..=n/2` of the raw FFT —
/// no windowing, no density scaling. Ratio-style features cancel any
/// normalization, so none is applied.
pub fn power_spectrum(x: &[f64]) -> Vec<f64> {
    let spec = fft_real(x);
    let half = x.len() / 2;
    spec[..=half].iter().map(|c| c.norm_sqr()).collect()
}

/// One-sided amplitude spectrum |X_i| of the Hamming-windowed signal,
/// bins `0..=n/2`.
pub fn amplitude_spectrum_hamming(x: &[f64]) -> Vec<f64> {
    let w = hamming(x.len());
    let windowed: Vec<f64> = x.iter().zip(&w).map(|(&v, &wi)| v * wi).collect();
    let spec = fft_real(&windowed);
    let half = x.len() / 2;
    spec[..=half].iter().map(|c| c.norm()).collect()
}

/// Analytic signal via the FFT Hilbert transform: positive frequencies
/// doubled, negative zeroed, DC (and Nyquist for even n) kept.
pub fn analytic_signal(x: &[f64]) -> Vec<Complex<f64>> {
    let n = x.len();
    let mut buf = fft_real(x);
    let half = n / 2;
    for (i, v) in buf.iter_mut().enumerate() {
        if i == 0 || (n % 2 == 0 && i == half) {
            // keep as-is
        } else if i < half || (n % 2 == 1 && i == half) {
            *v *= 2.0;
        } else {
            *v = Complex::new(0.0, 0.0);
        }
    }
    ifft_in_place(&mut buf);
    buf
}

/// Envelope of the analytic signal.
pub fn hilbert_envelope(x: &[f64]) -> Vec<f64> {
    analytic_signal(x).iter().map(|c| c.norm()).collect()
}
