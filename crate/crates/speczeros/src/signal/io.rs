//! Signal file I/O: mono WAV (16-bit PCM and 32-bit float) and
//! single-column CSV of samples.

use super::TimeSeries;
use crate::{Error, Result};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WavFormat {
    Pcm16,
    Float32,
}

/// Read a mono WAV file into a real time series.
pub fn read_wav(path: &Path) -> Result<TimeSeries> {
    let reader = hound::WavReader::open(path)
        .map_err(|e| Error::invalid(format!("read-wav {}: {e}", path.display())))?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(Error::invalid(format!(
            "read-wav {}: expected mono, got {} channels",
            path.display(),
            spec.channels
        )));
    }
    let rate = spec.sample_rate as f64;
    let samples: std::result::Result<Vec<f64>, hound::Error> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => reader
            .into_samples::<i16>()
            .map(|s| s.map(|x| x as f64 / 32768.0))
            .collect(),
        (hound::SampleFormat::Float, 32) => reader
            .into_samples::<f32>()
            .map(|s| s.map(|x| x as f64))
            .collect(),
        (fmt, bits) => {
            return Err(Error::invalid(format!(
                "read-wav {}: unsupported format {fmt:?}/{bits} bits (need 16-bit PCM or 32-bit float)",
                path.display()
            )))
        }
    };
    let samples = samples.map_err(|e| Error::invalid(format!("read-wav {}: {e}", path.display())))?;
    TimeSeries::from_real(samples, rate)
}

/// Write a real time series as a mono WAV file.
pub fn write_wav(path: &Path, ts: &TimeSeries, format: WavFormat) -> Result<()> {
    if !ts.is_real() {
        return Err(Error::invalid("write-wav: complex signals cannot be written as WAV"));
    }
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: ts.sample_rate().round() as u32,
        bits_per_sample: match format {
            WavFormat::Pcm16 => 16,
            WavFormat::Float32 => 32,
        },
        sample_format: match format {
            WavFormat::Pcm16 => hound::SampleFormat::Int,
            WavFormat::Float32 => hound::SampleFormat::Float,
        },
    };
    let mut writer = hound::WavWriter::create(path, spec)
        .map_err(|e| Error::invalid(format!("write-wav {}: {e}", path.display())))?;
    for z in ts.samples() {
        match format {
            WavFormat::Pcm16 => {
                let clamped = (z.re.clamp(-1.0, 1.0) * 32767.0).round() as i16;
                writer
                    .write_sample(clamped)
                    .map_err(|e| Error::invalid(format!("write-wav {}: {e}", path.display())))?;
            }
            WavFormat::Float32 => {
                writer
                    .write_sample(z.re as f32)
                    .map_err(|e| Error::invalid(format!("write-wav {}: {e}", path.display())))?;
            }
        }
    }
    writer
        .finalize()
        .map_err(|e| Error::invalid(format!("write-wav {}: {e}", path.display())))?;
    Ok(())
}

/// Read a single-column CSV of real samples. Lines starting with `#` and a
/// leading non-numeric header line are skipped; the sample rate defaults to
/// 1 unless given.
pub fn read_csv_signal(path: &Path, sample_rate: Option<f64>) -> Result<TimeSeries> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(format!("open {}", path.display()), e))?;
    let mut samples = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(format!("read {}", path.display()), e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        match trimmed.parse::<f64>() {
            Ok(x) => samples.push(x),
            Err(_) if lineno == 0 => continue, // header row
            Err(e) => {
                return Err(Error::invalid(format!(
                    "read-csv {} line {}: {e}",
                    path.display(),
                    lineno + 1
                )))
            }
        }
    }
    TimeSeries::from_real(samples, sample_rate.unwrap_or(1.0))
}

/// Write a time series as CSV: one column for real signals, `re,im` columns
/// for complex ones.
pub fn write_csv_signal(path: &Path, ts: &TimeSeries) -> Result<()> {
    let mut out = String::new();
    if ts.is_real() {
        for z in ts.samples() {
            out.push_str(&format!("{}\n", z.re));
        }
    } else {
        for z in ts.samples() {
            out.push_str(&format!("{},{}\n", z.re, z.im));
        }
    }
    let mut file =
        std::fs::File::create(path).map_err(|e| Error::io(format!("create {}", path.display()), e))?;
    file.write_all(out.as_bytes())
        .map_err(|e| Error::io(format!("write {}", path.display()), e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{synth, SynthKind};

    #[test]
    fn wav_float_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sig.wav");
        let ts = synth(SynthKind::Chirp(Default::default()), 256).unwrap();
        write_wav(&path, &ts, WavFormat::Float32).unwrap();
        let back = read_wav(&path).unwrap();
        assert_eq!(back.len(), 256);
        for (a, b) in ts.samples().iter().zip(back.samples()) {
            assert!((a.re - b.re).abs() < 1e-6);
        }
    }

    #[test]
    fn wav_pcm16_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sig16.wav");
        let ts = synth(SynthKind::SharpAttack(Default::default()), 128).unwrap();
        write_wav(&path, &ts, WavFormat::Pcm16).unwrap();
        let back = read_wav(&path).unwrap();
        for (a, b) in ts.samples().iter().zip(back.samples()) {
            assert!((a.re - b.re).abs() < 1.0 / 32000.0);
        }
    }

    #[test]
    fn malformed_wav_is_diagnosed() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.wav");
        std::fs::write(&path, b"not a wav file at all").unwrap();
        let err = read_wav(&path).unwrap_err();
        assert!(err.to_string().contains("read-wav"));
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sig.csv");
        let ts = synth(SynthKind::Impulses(Default::default()), 64).unwrap();
        write_csv_signal(&path, &ts).unwrap();
        let back = read_csv_signal(&path, None).unwrap();
        assert_eq!(ts.samples(), back.samples());
    }
}
