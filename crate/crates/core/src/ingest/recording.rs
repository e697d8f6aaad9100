use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::calibration::Calibration;
use super::manifest::ManifestEntry;
use crate::error::{Error, Result};
use crate::label::{ClassLabel, SubjectDay};

/// One subject-day of univariate signal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawRecording {
    pub samples: Vec<f64>,
    pub sample_rate_hz: f64,
    pub subject_id: String,
    pub day_index: u32,
    pub class_label: ClassLabel,
    /// Level mapping applied to `samples`, if any. `None` means raw units.
    pub calibration: Option<Calibration>,
}

impl RawRecording {
    pub fn new(
        samples: Vec<f64>,
        sample_rate_hz: f64,
        subject_id: impl Into<String>,
        day_index: u32,
        class_label: ClassLabel,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::ZeroLength);
        }
        if !(sample_rate_hz > 0.0) || !sample_rate_hz.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        Ok(RawRecording {
            samples,
            sample_rate_hz,
            subject_id: subject_id.into(),
            day_index,
            class_label,
            calibration: None,
        })
    }

    pub fn id(&self) -> SubjectDay {
        SubjectDay::new(self.subject_id.clone(), self.day_index, self.class_label)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz
    }
}

/// Load a WAV (16-bit PCM mono) or single-column CSV file.
///
/// The format is picked by extension: `.wav` is WAV, anything else is CSV.
/// WAV sample rate comes from the header; CSV needs it from the manifest.
pub fn load_recording(path: &Path, entry: &ManifestEntry) -> Result<RawRecording> {
    let is_wav = path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("wav"))
        .unwrap_or(false);
    let (samples, rate) = if is_wav {
        read_wav(path)?
    } else {
        let rate = entry.sample_rate_hz.ok_or_else(|| Error::Unreadable {
            path: path.to_path_buf(),
            reason: "CSV input needs sample_rate_hz in the manifest entry".into(),
        })?;
        (read_csv(path)?, rate)
    };
    RawRecording::new(samples, rate, entry.subject.clone(), entry.day, entry.label)
}

/// Read a mono 16-bit WAV, mapping int16 onto [-1, 1) by dividing by 32768.
pub fn read_wav(path: &Path) -> Result<(Vec<f64>, f64)> {
    let unreadable = |reason: String| Error::Unreadable {
        path: path.to_path_buf(),
        reason,
    };
    let reader = hound::WavReader::open(path).map_err(|e| unreadable(e.to_string()))?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(Error::MultiChannel {
            path: path.to_path_buf(),
            channels: spec.channels,
        });
    }
    if spec.sample_format != hound::SampleFormat::Int || spec.bits_per_sample != 16 {
        return Err(unreadable(format!(
            "expected 16-bit integer PCM, got {:?} {} bits",
            spec.sample_format, spec.bits_per_sample
        )));
    }
    let samples = reader
        .into_samples::<i16>()
        .map(|s| s.map(|v| v as f64 / 32768.0))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| unreadable(e.to_string()))?;
    if samples.is_empty() {
        return Err(Error::ZeroLength);
    }
    Ok((samples, spec.sample_rate as f64))
}

/// Write mono 16-bit PCM. Values are clamped to the int16 range.
pub fn write_wav(path: &Path, samples: &[f64], sample_rate_hz: u32) -> Result<()> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: sample_rate_hz,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let to_err = |e: hound::Error| match e {
        hound::Error::IoError(io) => Error::io(path, io),
        other => Error::Unreadable {
            path: path.to_path_buf(),
            reason: other.to_string(),
        },
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(to_err)?;
    for &x in samples {
        let v = (x * 32768.0).round().clamp(i16::MIN as f64, i16::MAX as f64) as i16;
        writer.write_sample(v).map_err(to_err)?;
    }
    writer.finalize().map_err(to_err)
}

/// Parse one real per line; blank lines are skipped.
pub fn parse_csv_signal(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: `{line}` is not a number", lineno + 1)))?;
        out.push(v);
    }
    if out.is_empty() {
        return Err(Error::ZeroLength);
    }
    Ok(out)
}

pub fn read_csv(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv_signal(&text).map_err(|e| match e {
        Error::Parse(reason) => Error::Unreadable {
            path: path.to_path_buf(),
            reason,
        },
        other => other,
    })
}

pub fn write_csv(path: &Path, samples: &[f64]) -> Result<()> {
    let mut text = String::with_capacity(samples.len() * 12);
    for x in samples {
        text.push_str(&x.to_string());
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(rate: Option<f64>) -> ManifestEntry {
        ManifestEntry {
            path: "x".into(),
            subject: "S1".into(),
            day: 0,
            label: ClassLabel::Control,
            sample_rate_hz: rate,
            calibration: vec![],
        }
    }

    #[test]
    fn csv_three_samples() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        fs::write(&path, "0.0\n1.0\n-1.0").unwrap();
        let rec = load_recording(&path, &entry(Some(100.0))).unwrap();
        assert_eq!(rec.samples, vec![0.0, 1.0, -1.0]);
        assert_eq!(rec.sample_rate_hz, 100.0);
        assert_eq!(rec.subject_id, "S1");
    }

    #[test]
    fn empty_csv_is_zero_length() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        fs::write(&path, "").unwrap();
        let err = load_recording(&path, &entry(Some(100.0))).unwrap_err();
        assert_eq!(err.to_string(), "zero-length signal");
    }

    #[test]
    fn wav_half_scale() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.wav");
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: 11025,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut w = hound::WavWriter::create(&path, spec).unwrap();
        w.write_sample(16384i16).unwrap();
        w.write_sample(-32768i16).unwrap();
        w.finalize().unwrap();
        let rec = load_recording(&path, &entry(None)).unwrap();
        assert_eq!(rec.samples, vec![0.5, -1.0]);
        assert_eq!(rec.sample_rate_hz, 11025.0);
    }

    #[test]
    fn stereo_wav_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.wav");
        let spec = hound::WavSpec {
            channels: 2,
            sample_rate: 8000,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut w = hound::WavWriter::create(&path, spec).unwrap();
        w.write_sample(1i16).unwrap();
        w.write_sample(1i16).unwrap();
        w.finalize().unwrap();
        assert!(matches!(
            load_recording(&path, &entry(None)),
            Err(Error::MultiChannel { channels: 2, .. })
        ));
    }

    #[test]
    fn missing_file_is_unreadable() {
        let err = load_recording(Path::new("/nonexistent/x.wav"), &entry(None)).unwrap_err();
        assert!(matches!(err, Error::Unreadable { .. }));
    }

    #[test]
    fn wav_write_read_is_quantized_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("y.wav");
        let xs = [0.0, 0.25, -0.5, 0.999];
        write_wav(&path, &xs, 11025).unwrap();
        let (ys, rate) = read_wav(&path).unwrap();
        assert_eq!(rate, 11025.0);
        for (x, y) in xs.iter().zip(&ys) {
            assert!((x - y).abs() <= 0.5 / 32768.0);
        }
    }
}
