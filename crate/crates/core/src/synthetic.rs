//! Synthetic two-database WFDB corpus for end-to-end exercise of the
//! pipeline when no real recordings are on disk.
//!
//! Each record alternates sinus-like episodes (a ~72 bpm biphasic spike
//! train over baseline wander) with fibrillation-like episodes (amplitude-
//! and frequency-wandering oscillation around 4–7 Hz plus a weak second
//! harmonic). Rhythm changes are annotated the way the real databases do
//! it: `+` rhythm labels with `(N` / `(VF` aux strings on most records,
//! `[` / `]` episode markers on every third one, a `(NOISE` stretch on
//! every fourth. Generation is a pure function of the seed.

use crate::error::Result;
use crate::rng::stream_rng;
use crate::wfdb::{self, code, Annotation, WriteChannel};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;
use std::path::Path;

#[derive(Debug, Clone)]
pub struct SyntheticConfig {
    pub n_records: usize,
    /// Native sampling rate of the generated records, Hz.
    pub fs: f64,
    /// Duration of each record, seconds.
    pub duration_s: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            n_records: 6,
            fs: 250.0,
            duration_s: 48.0,
            seed: 1234,
        }
    }
}

/// ADC gain used for all synthetic channels, ADC units per millivolt.
const GAIN: f64 = 200.0;

/// Append `n` samples of a sinus-like rhythm: sharp biphasic beats at a
/// jittered ~72 bpm over slow baseline wander and measurement noise.
fn sinus(rng: &mut ChaCha8Rng, fs: f64, n: usize, out: &mut Vec<f64>, beats: &mut Vec<usize>) {
    let start = out.len();
    let wander_phase: f64 = rng.gen_range(0.0..TAU);
    for i in 0..n {
        let t = (start + i) as f64 / fs;
        let wander = 0.08 * (TAU * 0.3 * t + wander_phase).sin();
        out.push(wander + 0.02 * rng.gen_range(-1.0..1.0));
    }
    // Beat positions first, waveforms after, so a beat near the episode end
    // can spill its tail without reading past the buffer.
    let mut t_beat = rng.gen_range(0.0..0.3);
    while t_beat < n as f64 / fs {
        let center = start + (t_beat * fs) as usize;
        beats.push(center);
        let amp = rng.gen_range(0.9..1.3);
        let width = 0.02 * fs; // ~20 ms half-width
        let lo = center.saturating_sub((3.0 * width) as usize);
        let hi = (center + (3.0 * width) as usize).min(out.len());
        for (j, v) in out.iter_mut().enumerate().take(hi).skip(lo) {
            let u = (j as f64 - center as f64) / width;
            *v += amp * u * (-u * u).exp() * 1.5;
        }
        t_beat += rng.gen_range(0.78..0.88);
    }
}

/// Append `n` samples of a fibrillation-like rhythm: an oscillation whose
/// frequency random-walks inside 4–7 Hz and whose amplitude drifts in
/// 0.4–1.2 mV, plus a weak second harmonic and noise.
fn fibrillation(rng: &mut ChaCha8Rng, fs: f64, n: usize, out: &mut Vec<f64>) {
    let mut freq: f64 = rng.gen_range(4.5..6.5);
    let mut amp: f64 = rng.gen_range(0.6..1.0);
    let mut phase: f64 = rng.gen_range(0.0..TAU);
    for _ in 0..n {
        freq = (freq + rng.gen_range(-0.02..0.02)).clamp(4.0, 7.0);
        amp = (amp + rng.gen_range(-0.004..0.004)).clamp(0.4, 1.2);
        phase += TAU * freq / fs;
        out.push(
            amp * phase.sin()
                + 0.15 * amp * (2.0 * phase).sin()
                + 0.03 * rng.gen_range(-1.0..1.0),
        );
    }
}

/// Append `n` samples of annotation-grade noise: strong wideband jitter.
fn noise(rng: &mut ChaCha8Rng, n: usize, out: &mut Vec<f64>) {
    for _ in 0..n {
        out.push(0.6 * rng.gen_range(-1.0..1.0));
    }
}

/// One synthetic record: millivolt samples plus its annotation stream.
pub fn generate_record(cfg: &SyntheticConfig, index: usize) -> (Vec<f64>, Vec<Annotation>) {
    let mut rng = stream_rng(cfg.seed, "synthetic", index as u64);
    let fs = cfg.fs;
    let n_total = (cfg.duration_s * fs).round() as usize;
    let mut samples = Vec::with_capacity(n_total);
    let mut beats = Vec::new();
    let mut anns = Vec::new();
    let rhythm = |time: usize, label: &str| Annotation {
        time: time as u64,
        code: code::RHYTHM,
        aux: Some(format!("({label}")),
    };
    match index % 3 {
        0 => {
            // Sinus first, fibrillation second.
            let mid = (n_total as f64 * rng.gen_range(0.40..0.60)) as usize;
            anns.push(rhythm(0, "N"));
            sinus(&mut rng, fs, mid, &mut samples, &mut beats);
            anns.push(rhythm(mid, "VF"));
            fibrillation(&mut rng, fs, n_total - mid, &mut samples);
        }
        1 => {
            // Fibrillation first, sinus second.
            let mid = (n_total as f64 * rng.gen_range(0.40..0.60)) as usize;
            anns.push(rhythm(0, "VF"));
            fibrillation(&mut rng, fs, mid, &mut samples);
            anns.push(rhythm(mid, "N"));
            sinus(&mut rng, fs, n_total - mid, &mut samples, &mut beats);
        }
        _ => {
            // Sinus with an embedded episode marked via `[` / `]`, and on
            // every fourth record a trailing noise stretch.
            let ep_start = (n_total as f64 * 0.35) as usize;
            let ep_end = (n_total as f64 * 0.70) as usize;
            let noisy = index % 4 == 3;
            let tail_start = if noisy {
                n_total - (10.0 * fs) as usize
            } else {
                n_total
            };
            anns.push(rhythm(0, "N"));
            sinus(&mut rng, fs, ep_start, &mut samples, &mut beats);
            anns.push(Annotation { time: ep_start as u64, code: code::VFON, aux: None });
            fibrillation(&mut rng, fs, ep_end - ep_start, &mut samples);
            anns.push(Annotation { time: ep_end as u64, code: code::VFOFF, aux: None });
            sinus(&mut rng, fs, tail_start - ep_end, &mut samples, &mut beats);
            if noisy {
                anns.push(rhythm(tail_start, "NOISE"));
                noise(&mut rng, n_total - tail_start, &mut samples);
            }
        }
    }
    // Beat annotations carry no rhythm information; they are here so the
    // reader's ignore path sees realistic traffic.
    for b in beats {
        anns.push(Annotation { time: b as u64, code: code::NORMAL, aux: None });
    }
    anns.sort_by_key(|a| a.time);
    (samples, anns)
}

/// Write the corpus under `db_dir` in the on-disk layout the ingest stage
/// scans: records alternate between a `cudb/` and a `vfdb/` subdirectory
/// and between formats 212 and 16. Returns the record ids written.
pub fn write_corpus(db_dir: &Path, cfg: &SyntheticConfig) -> Result<Vec<String>> {
    let cudb = db_dir.join("cudb");
    let vfdb = db_dir.join("vfdb");
    std::fs::create_dir_all(&cudb).map_err(|e| crate::Error::io(&cudb, e))?;
    std::fs::create_dir_all(&vfdb).map_err(|e| crate::Error::io(&vfdb, e))?;
    let mut ids = Vec::with_capacity(cfg.n_records);
    for index in 0..cfg.n_records {
        let (samples, anns) = generate_record(cfg, index);
        let record_id = format!("syn{index:02}");
        let dir = if index % 2 == 0 { &cudb } else { &vfdb };
        let format = if index % 2 == 0 { 212 } else { 16 };
        let adc: Vec<i32> = samples
            .iter()
            .map(|&mv| ((mv * GAIN).round() as i32).clamp(-2047, 2047))
            .collect();
        let channel = WriteChannel {
            description: "ECG".into(),
            units: "mV".into(),
            gain: GAIN,
            baseline: 0,
            adc,
        };
        wfdb::write_record(dir, &record_id, cfg.fs, format, &[channel])?;
        wfdb::write_annotations(&dir.join(format!("{record_id}.atr")), &anns)?;
        ids.push(record_id);
    }
    Ok(ids)
}
