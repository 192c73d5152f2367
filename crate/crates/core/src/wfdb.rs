//! Minimal WFDB reader/writer: text headers, signal files in format 212
//! (two 12-bit samples per 3 bytes) and format 16 (little-endian i16), and
//! MIT-format annotation files. Writing exists so tests and the synthetic
//! corpus generator can round-trip the exact on-disk layout.

use crate::error::{Error, Result};
use std::fs;
use std::path::{Path, PathBuf};

/// Annotation type codes used by this pipeline.
pub mod code {
    /// Rhythm change; the rhythm name is in the aux string, e.g. `(VF`.
    pub const RHYTHM: u8 = 28;
    /// Start of ventricular fibrillation / flutter (`[`).
    pub const VFON: u8 = 32;
    /// End of ventricular fibrillation / flutter (`]`).
    pub const VFOFF: u8 = 33;
    /// Normal beat (`N`); present in beat-annotated records, class-neutral here.
    pub const NORMAL: u8 = 1;

    pub(super) const SKIP: u8 = 59;
    pub(super) const NUM: u8 = 60;
    pub(super) const SUB: u8 = 61;
    pub(super) const CHN: u8 = 62;
    pub(super) const AUX: u8 = 63;
}

/// One signal (channel) description from a `.hea` file.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSpec {
    pub file_name: String,
    pub format: i32,
    /// ADC units per physical unit; 200 when the header leaves it 0.
    pub gain: f64,
    /// ADC value corresponding to 0 physical units.
    pub baseline: i32,
    pub units: String,
    pub adc_res: u32,
    pub adc_zero: i32,
    pub init_value: i32,
    /// 16-bit checksum of all original samples; verified with a warning.
    pub checksum: i16,
    pub description: String,
}

impl Default for SignalSpec {
    fn default() -> Self {
        SignalSpec {
            file_name: String::new(),
            format: 212,
            gain: 200.0,
            baseline: 0,
            units: "mV".into(),
            adc_res: 12,
            adc_zero: 0,
            init_value: 0,
            checksum: 0,
            description: String::new(),
        }
    }
}

/// Parsed `.hea` file.
#[derive(Debug, Clone, PartialEq)]
pub struct Header {
    pub record_name: String,
    pub fs: f64,
    /// Declared sample count per signal; 0 when the header omits it.
    pub n_samples: usize,
    pub signals: Vec<SignalSpec>,
}

fn header_err(path: &Path, msg: impl Into<String>) -> Error {
    Error::HeaderParse {
        path: path.to_path_buf(),
        msg: msg.into(),
    }
}

/// Parse a `.hea` file. Only single-segment records are supported; extra
/// header features (skew, byte offsets, sampling-frequency modifiers) are
/// rejected rather than silently misread.
pub fn parse_header(path: &Path, text: &str) -> Result<Header> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let first = lines
        .next()
        .ok_or_else(|| header_err(path, "empty header"))?;
    let mut tok = first.split_whitespace();
    let record_field = tok
        .next()
        .ok_or_else(|| header_err(path, "missing record name"))?;
    if record_field.contains('/') {
        return Err(header_err(path, "multi-segment records unsupported"));
    }
    let n_signals: usize = tok
        .next()
        .ok_or_else(|| header_err(path, "missing signal count"))?
        .parse()
        .map_err(|_| header_err(path, "bad signal count"))?;
    let fs: f64 = match tok.next() {
        // The sampling-frequency field may carry counter-frequency and base
        // counter suffixes (`250/...` or `250(...)`) — the leading number is
        // the sampling frequency.
        Some(f) => {
            let lead: String = f
                .chars()
                .take_while(|c| c.is_ascii_digit() || *c == '.')
                .collect();
            lead.parse()
                .map_err(|_| header_err(path, format!("bad sampling frequency `{f}`")))?
        }
        None => 250.0,
    };
    let n_samples: usize = match tok.next() {
        Some(s) => s
            .parse()
            .map_err(|_| header_err(path, format!("bad sample count `{s}`")))?,
        None => 0,
    };
    if fs <= 0.0 {
        return Err(header_err(path, "sampling frequency must be positive"));
    }

    let mut signals = Vec::with_capacity(n_signals);
    for i in 0..n_signals {
        let line = lines
            .next()
            .ok_or_else(|| header_err(path, format!("missing signal line {i}")))?;
        signals.push(parse_signal_line(path, line)?);
    }
    Ok(Header {
        record_name: record_field.to_string(),
        fs,
        n_samples,
        signals,
    })
}

fn parse_signal_line(path: &Path, line: &str) -> Result<SignalSpec> {
    let mut tok = line.split_whitespace();
    let file_name = tok
        .next()
        .ok_or_else(|| header_err(path, "signal line missing file name"))?
        .to_string();
    let fmt_field = tok
        .next()
        .ok_or_else(|| header_err(path, "signal line missing format"))?;
    if fmt_field.contains(['x', ':', '+']) {
        return Err(header_err(
            path,
            format!("format modifiers unsupported: `{fmt_field}`"),
        ));
    }
    let format: i32 = fmt_field
        .parse()
        .map_err(|_| header_err(path, format!("bad format `{fmt_field}`")))?;

    let mut spec = SignalSpec {
        file_name,
        format,
        ..SignalSpec::default()
    };

    if let Some(gain_field) = tok.next() {
        // gain[(baseline)][/units]
        let (gain_part, units) = match gain_field.split_once('/') {
            Some((g, u)) => (g, Some(u)),
            None => (gain_field, None),
        };
        let (gain_str, baseline) = match gain_part.split_once('(') {
            Some((g, rest)) => {
                let b = rest
                    .strip_suffix(')')
                    .ok_or_else(|| header_err(path, "unterminated baseline"))?;
                (
                    g,
                    Some(
                        b.parse::<i32>()
                            .map_err(|_| header_err(path, format!("bad baseline `{b}`")))?,
                    ),
                )
            }
            None => (gain_part, None),
        };
        let gain: f64 = gain_str
            .parse()
            .map_err(|_| header_err(path, format!("bad gain `{gain_str}`")))?;
        spec.gain = if gain == 0.0 { 200.0 } else { gain };
        if let Some(u) = units {
            spec.units = u.to_string();
        }
        if let Some(res) = tok.next() {
            spec.adc_res = res
                .parse()
                .map_err(|_| header_err(path, format!("bad adc resolution `{res}`")))?;
        }
        if let Some(zero) = tok.next() {
            spec.adc_zero = zero
                .parse()
                .map_err(|_| header_err(path, format!("bad adc zero `{zero}`")))?;
        }
        spec.baseline = baseline.unwrap_or(spec.adc_zero);
        if let Some(init) = tok.next() {
            spec.init_value = init
                .parse()
                .map_err(|_| header_err(path, format!("bad initial value `{init}`")))?;
        }
        if let Some(ck) = tok.next() {
            spec.checksum = ck
                .parse()
                .map_err(|_| header_err(path, format!("bad checksum `{ck}`")))?;
        }
        let _block_size = tok.next();
        let rest: Vec<&str> = tok.collect();
        if !rest.is_empty() {
            spec.description = rest.join(" ");
        }
    }
    Ok(spec)
}

/// Render a header back to `.hea` text.
pub fn format_header(h: &Header) -> String {
    let mut out = format!(
        "{} {} {} {}\n",
        h.record_name,
        h.signals.len(),
        h.fs,
        h.n_samples
    );
    for s in &h.signals {
        out.push_str(&format!(
            "{} {} {}({})/{} {} {} {} {} 0 {}\n",
            s.file_name,
            s.format,
            s.gain,
            s.baseline,
            s.units,
            s.adc_res,
            s.adc_zero,
            s.init_value,
            s.checksum,
            s.description
        ));
    }
    out
}

fn sign_extend_12(v: u16) -> i32 {
    let v = i32::from(v & 0x0FFF);
    if v & 0x800 != 0 {
        v - 0x1000
    } else {
        v
    }
}

/// Decode a format-212 byte stream into interleaved samples.
///
/// Each 3-byte group packs two 12-bit two's-complement samples: the first
/// occupies byte 0 plus the low nibble of byte 1, the second occupies byte 2
/// plus the high nibble of byte 1. `n_samples` bounds the output (a trailing
/// half-used triplet is legal).
pub fn decode_212(bytes: &[u8], n_samples: usize) -> Vec<i32> {
    let mut out = Vec::with_capacity(n_samples);
    for chunk in bytes.chunks(3) {
        if out.len() >= n_samples {
            break;
        }
        if chunk.len() < 2 {
            break;
        }
        let b0 = u16::from(chunk[0]);
        let b1 = u16::from(chunk[1]);
        out.push(sign_extend_12(((b1 & 0x0F) << 8) | b0));
        if out.len() >= n_samples || chunk.len() < 3 {
            break;
        }
        let b2 = u16::from(chunk[2]);
        out.push(sign_extend_12(((b1 & 0xF0) << 4) | b2));
    }
    out
}

/// Encode interleaved samples as format 212. Values outside the 12-bit range
/// are clamped.
pub fn encode_212(samples: &[i32]) -> Vec<u8> {
    let mut out = Vec::with_capacity((samples.len() * 3).div_ceil(2));
    for pair in samples.chunks(2) {
        let s1 = pair[0].clamp(-2048, 2047) as u16 & 0x0FFF;
        let s2 = if pair.len() == 2 {
            pair[1].clamp(-2048, 2047) as u16 & 0x0FFF
        } else {
            0
        };
        out.push((s1 & 0xFF) as u8);
        out.push((((s1 >> 8) & 0x0F) | ((s2 >> 8) << 4)) as u8);
        out.push((s2 & 0xFF) as u8);
    }
    out
}

/// Decode format 16 (little-endian i16) into interleaved samples.
pub fn decode_16(bytes: &[u8], n_samples: usize) -> Vec<i32> {
    bytes
        .chunks_exact(2)
        .take(n_samples)
        .map(|c| i32::from(i16::from_le_bytes([c[0], c[1]])))
        .collect()
}

/// Encode interleaved samples as format 16.
pub fn encode_16(samples: &[i32]) -> Vec<u8> {
    let mut out = Vec::with_capacity(samples.len() * 2);
    for &s in samples {
        out.extend_from_slice(&(s.clamp(-32768, 32767) as i16).to_le_bytes());
    }
    out
}

/// 16-bit checksum used by header signal lines: the sum of all original
/// samples of one signal, truncated to i16.
pub fn signal_checksum(samples: &[i32]) -> i16 {
    samples
        .iter()
        .fold(0i16, |acc, &s| acc.wrapping_add(s as i16))
}

/// All channels of a signal file, de-interleaved: `channels[c][t]` in ADC
/// units.
pub fn read_signal_file(
    dat_path: &Path,
    header: &Header,
) -> Result<Vec<Vec<i32>>> {
    let n_sig = header.signals.len();
    if n_sig == 0 {
        return Err(header_err(dat_path, "header declares no signals"));
    }
    let format = header.signals[0].format;
    if header.signals.iter().any(|s| s.format != format) {
        return Err(header_err(dat_path, "mixed formats in one signal file"));
    }
    let bytes = fs::read(dat_path).map_err(|e| Error::io(dat_path, e))?;
    let total = if header.n_samples > 0 {
        header.n_samples * n_sig
    } else {
        usize::MAX
    };
    let flat = match format {
        212 => decode_212(&bytes, total),
        16 => decode_16(&bytes, total),
        other => return Err(Error::UnsupportedFormat(other)),
    };
    let frames = flat.len() / n_sig;
    let mut channels = vec![Vec::with_capacity(frames); n_sig];
    for (i, &v) in flat.iter().enumerate().take(frames * n_sig) {
        channels[i % n_sig].push(v);
    }
    for (c, ch) in channels.iter().enumerate() {
        let expect = header.signals[c].checksum;
        let got = signal_checksum(ch);
        if expect != 0 && got != expect {
            log::warn!(
                "checksum mismatch on {} channel {c}: header {expect}, data {got}",
                dat_path.display()
            );
        }
    }
    Ok(channels)
}

/// One annotation with its absolute sample time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annotation {
    pub time: u64,
    pub code: u8,
    pub aux: Option<String>,
}

/// Read a MIT-format annotation file.
///
/// The stream is a sequence of little-endian 16-bit words: the top 6 bits
/// are the type code, the low 10 bits a time delta. SKIP carries a 32-bit
/// interval (high word first); AUX carries a byte count of auxiliary data
/// (padded to even length); NUM/SUB/CHN modifiers are skipped. A zero word
/// terminates the stream.
pub fn read_annotations(path: &Path) -> Result<Vec<Annotation>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_annotations(path, &bytes)
}

fn parse_annotations(path: &Path, bytes: &[u8]) -> Result<Vec<Annotation>> {
    let ann_err = |msg: &str| Error::AnnotationParse {
        path: path.to_path_buf(),
        msg: msg.into(),
    };
    let mut words = bytes
        .chunks_exact(2)
        .map(|c| u16::from_le_bytes([c[0], c[1]]));
    let mut out: Vec<Annotation> = Vec::new();
    let mut time: i64 = 0;
    while let Some(word) = words.next() {
        if word == 0 {
            break; // end of stream
        }
        let code = (word >> 10) as u8;
        let delta = i64::from(word & 0x03FF);
        match code {
            code::SKIP => {
                let hi = words.next().ok_or_else(|| ann_err("truncated SKIP"))?;
                let lo = words.next().ok_or_else(|| ann_err("truncated SKIP"))?;
                let interval = (i32::from(hi as i16) as i64) << 16 | i64::from(lo);
                time += interval;
            }
            code::AUX => {
                let len = delta as usize;
                let mut data = Vec::with_capacity(len);
                let padded = len + (len & 1);
                for _ in 0..padded / 2 {
                    let w = words.next().ok_or_else(|| ann_err("truncated AUX"))?;
                    data.extend_from_slice(&w.to_le_bytes());
                }
                data.truncate(len);
                let text = String::from_utf8_lossy(&data)
                    .trim_end_matches('\0')
                    .to_string();
                match out.last_mut() {
                    Some(last) => last.aux = Some(text),
                    None => return Err(ann_err("AUX with no preceding annotation")),
                }
            }
            code::NUM | code::SUB | code::CHN => {} // field modifiers; ignored
            _ => {
                time += delta;
                if time < 0 {
                    return Err(ann_err("negative annotation time"));
                }
                out.push(Annotation {
                    time: time as u64,
                    code,
                    aux: None,
                });
            }
        }
    }
    Ok(out)
}

/// Write a MIT-format annotation file (inverse of [`read_annotations`]).
pub fn write_annotations(path: &Path, anns: &[Annotation]) -> Result<()> {
    let mut bytes: Vec<u8> = Vec::new();
    let mut prev: u64 = 0;
    for a in anns {
        let mut delta = a.time as i64 - prev as i64;
        if delta < 0 {
            return Err(Error::AnnotationParse {
                path: path.to_path_buf(),
                msg: "annotation times must be non-decreasing".into(),
            });
        }
        if delta > 1023 {
            bytes.extend_from_slice(&(u16::from(code::SKIP) << 10).to_le_bytes());
            bytes.extend_from_slice(&(((delta >> 16) & 0xFFFF) as u16).to_le_bytes());
            bytes.extend_from_slice(&((delta & 0xFFFF) as u16).to_le_bytes());
            delta = 0;
        }
        let word = (u16::from(a.code) << 10) | (delta as u16 & 0x03FF);
        bytes.extend_from_slice(&word.to_le_bytes());
        if let Some(aux) = &a.aux {
            let data = aux.as_bytes();
            let word = (u16::from(code::AUX) << 10) | (data.len() as u16 & 0x03FF);
            bytes.extend_from_slice(&word.to_le_bytes());
            bytes.extend_from_slice(data);
            if data.len() % 2 == 1 {
                bytes.push(0);
            }
        }
        prev = a.time;
    }
    bytes.extend_from_slice(&[0, 0]);
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// A channel to be written by [`write_record`].
#[derive(Debug, Clone)]
pub struct WriteChannel {
    pub description: String,
    pub units: String,
    pub gain: f64,
    pub baseline: i32,
    /// Samples in ADC units.
    pub adc: Vec<i32>,
}

/// Write `<record_id>.hea` and `<record_id>.dat` into `dir`. All channels
/// share one format and must have equal length.
pub fn write_record(
    dir: &Path,
    record_id: &str,
    fs: f64,
    format: i32,
    channels: &[WriteChannel],
) -> Result<()> {
    if channels.is_empty() {
        return Err(Error::EmptyInput {
            op: "wfdb::write_record",
        });
    }
    let n = channels[0].adc.len();
    if channels.iter().any(|c| c.adc.len() != n) {
        return Err(Error::ShapeMismatch {
            op: "wfdb::write_record (channel lengths)",
            expected: n,
            got: channels.iter().map(|c| c.adc.len()).max().unwrap_or(0),
        });
    }
    let dat_name = format!("{record_id}.dat");
    let adc_res = match format {
        212 => 12,
        16 => 16,
        other => return Err(Error::UnsupportedFormat(other)),
    };
    let header = Header {
        record_name: record_id.to_string(),
        fs,
        n_samples: n,
        signals: channels
            .iter()
            .map(|c| SignalSpec {
                file_name: dat_name.clone(),
                format,
                gain: c.gain,
                baseline: c.baseline,
                units: c.units.clone(),
                adc_res,
                adc_zero: c.baseline,
                init_value: c.adc.first().copied().unwrap_or(0),
                checksum: signal_checksum(&c.adc),
                description: c.description.clone(),
            })
            .collect(),
    };
    let mut flat = Vec::with_capacity(n * channels.len());
    for t in 0..n {
        for c in channels {
            flat.push(c.adc[t]);
        }
    }
    let bytes = match format {
        212 => encode_212(&flat),
        16 => encode_16(&flat),
        _ => unreachable!(),
    };
    let hea = dir.join(format!("{record_id}.hea"));
    fs::write(&hea, format_header(&header)).map_err(|e| Error::io(&hea, e))?;
    let dat = dir.join(&dat_name);
    fs::write(&dat, bytes).map_err(|e| Error::io(&dat, e))?;
    Ok(())
}

/// Locate the `.dat` file named by a header, relative to the header's
/// directory.
pub fn dat_path(hea_path: &Path, header: &Header) -> PathBuf {
    hea_path
        .parent()
        .unwrap_or_else(|| Path::new("."))
        .join(&header.signals[0].file_name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn decode_212_unpacks_nibbles() {
        // First sample = byte0 + low nibble of byte1; second = byte2 + high
        // nibble of byte1.
        assert_eq!(decode_212(&[0x01, 0x20, 0x03], 2), vec![1, 515]);
    }

    #[test]
    fn decode_212_sign_extends() {
        // 0xFFF is −1; 0x800 is −2048; 0x7FF is 2047.
        assert_eq!(decode_212(&[0xFF, 0x0F, 0x00], 2), vec![-1, 0]);
        assert_eq!(decode_212(&[0x00, 0x88, 0x00], 2), vec![-2048, -2048]);
        assert_eq!(decode_212(&[0xFF, 0x77, 0xFF], 2), vec![2047, 2047]);
    }

    #[test]
    fn codec_212_round_trips() {
        let mut rng = crate::rng::stream_rng(11, "test-212", 0);
        for len in [1usize, 2, 7, 100, 501] {
            let samples: Vec<i32> = (0..len).map(|_| rng.gen_range(-2048..=2047)).collect();
            assert_eq!(decode_212(&encode_212(&samples), len), samples);
        }
    }

    #[test]
    fn codec_16_round_trips() {
        let mut rng = crate::rng::stream_rng(11, "test-16", 0);
        let samples: Vec<i32> = (0..733).map(|_| rng.gen_range(-32768..=32767)).collect();
        assert_eq!(decode_16(&encode_16(&samples), 733), samples);
    }

    #[test]
    fn header_round_trips() {
        let h = Header {
            record_name: "cu01".into(),
            fs: 250.0,
            n_samples: 127232,
            signals: vec![SignalSpec {
                file_name: "cu01.dat".into(),
                format: 212,
                gain: 400.0,
                baseline: 0,
                units: "mV".into(),
                adc_res: 12,
                adc_zero: 0,
                init_value: 15,
                checksum: -1332,
                description: "ECG".into(),
            }],
        };
        let text = format_header(&h);
        let parsed = parse_header(Path::new("cu01.hea"), &text).unwrap();
        assert_eq!(parsed, h);
    }

    #[test]
    fn header_gain_defaults_apply() {
        let text = "r 1 250 1000\nr.dat 212 0 12 0\n";
        let h = parse_header(Path::new("r.hea"), text).unwrap();
        assert_eq!(h.signals[0].gain, 200.0);
        assert_eq!(h.signals[0].baseline, 0);
        assert_eq!(h.signals[0].units, "mV");
    }

    #[test]
    fn header_rejects_garbage() {
        assert!(parse_header(Path::new("x.hea"), "").is_err());
        assert!(parse_header(Path::new("x.hea"), "r one 250\n").is_err());
        assert!(parse_header(Path::new("x.hea"), "r 1 250\n").is_err()); // missing signal line
        assert!(parse_header(Path::new("x.hea"), "r 1 250 10\nr.dat 61x4\n").is_err());
    }

    #[test]
    fn annotations_round_trip_through_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.atr");
        let anns = vec![
            Annotation {
                time: 3,
                code: code::NORMAL,
                aux: None,
            },
            Annotation {
                time: 500,
                code: code::RHYTHM,
                aux: Some("(VF".into()),
            },
            // forces a SKIP (delta > 1023)
            Annotation {
                time: 900_000,
                code: code::RHYTHM,
                aux: Some("(NOISE".into()),
            },
            Annotation {
                time: 900_100,
                code: code::VFON,
                aux: None,
            },
            Annotation {
                time: 900_700,
                code: code::VFOFF,
                aux: None,
            },
        ];
        write_annotations(&path, &anns).unwrap();
        let back = read_annotations(&path).unwrap();
        assert_eq!(back, anns);
    }

    #[test]
    fn annotation_round_trip_randomized() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rand.atr");
        let mut rng = crate::rng::stream_rng(3, "test-atr", 0);
        for case in 0..20u64 {
            let mut time = 0u64;
            let mut anns = Vec::new();
            for _ in 0..rng.gen_range(1..40) {
                time += rng.gen_range(0..5000);
                let code = *[code::NORMAL, code::RHYTHM, code::VFON, code::VFOFF]
                    .iter()
                    .nth(rng.gen_range(0..4))
                    .unwrap();
                let aux = if rng.gen_bool(0.4) {
                    Some(format!("(R{case}"))
                } else {
                    None
                };
                anns.push(Annotation { time, code, aux });
            }
            write_annotations(&path, &anns).unwrap();
            assert_eq!(read_annotations(&path).unwrap(), anns, "case {case}");
        }
    }

    #[test]
    fn signal_file_round_trips_multichannel() {
        let dir = tempfile::tempdir().unwrap();
        let mut rng = crate::rng::stream_rng(5, "test-dat", 0);
        for format in [212, 16] {
            let ch0: Vec<i32> = (0..501).map(|_| rng.gen_range(-2048..=2047)).collect();
            let ch1: Vec<i32> = (0..501).map(|_| rng.gen_range(-2048..=2047)).collect();
            write_record(
                dir.path(),
                "rt",
                250.0,
                format,
                &[
                    WriteChannel {
                        description: "ECG0".into(),
                        units: "mV".into(),
                        gain: 200.0,
                        baseline: 0,
                        adc: ch0.clone(),
                    },
                    WriteChannel {
                        description: "ECG1".into(),
                        units: "mV".into(),
                        gain: 100.0,
                        baseline: 24,
                        adc: ch1.clone(),
                    },
                ],
            )
            .unwrap();
            let hea = dir.path().join("rt.hea");
            let header =
                parse_header(&hea, &fs::read_to_string(&hea).unwrap()).unwrap();
            assert_eq!(header.fs, 250.0);
            assert_eq!(header.n_samples, 501);
            assert_eq!(header.signals[1].baseline, 24);
            let channels = read_signal_file(&dat_path(&hea, &header), &header).unwrap();
            assert_eq!(channels, vec![ch0.clone(), ch1.clone()], "format {format}");
        }
    }

    #[test]
    fn odd_total_sample_count_survives_212() {
        // 3 channels × 3 frames = 9 samples: the final triplet is half-used.
        let dir = tempfile::tempdir().unwrap();
        let chans: Vec<WriteChannel> = (0..3)
            .map(|c| WriteChannel {
                description: format!("ch{c}"),
                units: "mV".into(),
                gain: 200.0,
                baseline: 0,
                adc: vec![c * 100 + 1, -(c * 7), 2047 - c],
            })
            .collect();
        write_record(dir.path(), "odd", 250.0, 212, &chans).unwrap();
        let hea = dir.path().join("odd.hea");
        let header = parse_header(&hea, &fs::read_to_string(&hea).unwrap()).unwrap();
        let channels = read_signal_file(&dat_path(&hea, &header), &header).unwrap();
        for (got, want) in channels.iter().zip(&chans) {
            assert_eq!(*got, want.adc);
        }
    }
}
