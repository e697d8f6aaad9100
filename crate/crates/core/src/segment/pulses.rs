use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where a pulse came from.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PulseSource {
    pub subject_id: String,
    pub day_index: u32,
    /// Index of the pulse's first sample in the full recording.
    pub start_sample: usize,
}

impl PulseSource {
    pub fn new(subject_id: impl Into<String>, day_index: u32, start_sample: usize) -> Self {
        PulseSource {
            subject_id: subject_id.into(),
            day_index,
            start_sample,
        }
    }
}

/// One peak-to-peak pulse.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseSegment {
    pub values: Vec<f64>,
    pub source: PulseSource,
    /// Sample count before length normalization.
    pub raw_length: usize,
}

/// Cut a region into half-open pulses `[peak_i, peak_{i+1})`.
///
/// `offset` is the region's start within the recording, used for provenance.
pub fn segment_pulses(
    region: &[f64],
    peaks: &[usize],
    subject_id: &str,
    day_index: u32,
    offset: usize,
) -> Vec<PulseSegment> {
    peaks
        .windows(2)
        .filter(|w| w[1] > w[0] + 1 && w[1] <= region.len())
        .map(|w| PulseSegment {
            values: region[w[0]..w[1]].to_vec(),
            source: PulseSource::new(subject_id, day_index, offset + w[0]),
            raw_length: w[1] - w[0],
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TargetLength {
    Fixed(usize),
    /// Longest raw length in the set, optionally capped.
    Auto { cap: Option<usize> },
}

impl Default for TargetLength {
    fn default() -> Self {
        TargetLength::Auto { cap: None }
    }
}

/// Linear interpolation of `xs` onto `len` evenly spaced points that include
/// both endpoints.
pub fn resample_linear(xs: &[f64], len: usize) -> Vec<f64> {
    let n = xs.len();
    if n == len {
        return xs.to_vec();
    }
    if n == 1 {
        return vec![xs[0]; len];
    }
    if len == 1 {
        return vec![xs[0]];
    }
    let span = (len - 1) as f64;
    (0..len)
        .map(|j| {
            if j == len - 1 {
                return xs[n - 1];
            }
            let pos = (j * (n - 1)) as f64 / span;
            let i = pos.floor() as usize;
            let frac = pos - i as f64;
            if frac == 0.0 || i + 1 >= n {
                xs[i.min(n - 1)]
            } else {
                xs[i] + frac * (xs[i + 1] - xs[i])
            }
        })
        .collect()
}

/// Resample every segment to a common length.
pub fn length_normalize(segments: Vec<PulseSegment>, target: TargetLength) -> Result<Vec<PulseSegment>> {
    if segments.is_empty() {
        return Err(Error::EmptyInput("no segments to length-normalize"));
    }
    let len = match target {
        TargetLength::Fixed(n) => n,
        TargetLength::Auto { cap } => {
            let longest = segments.iter().map(|s| s.values.len()).max().unwrap_or(0);
            cap.map_or(longest, |c| longest.min(c))
        }
    };
    if len < 2 {
        return Err(Error::InvalidParameter(format!(
            "target length must be at least 2, got {len}"
        )));
    }
    Ok(segments
        .into_iter()
        .map(|mut s| {
            if s.values.len() != len {
                s.values = resample_linear(&s.values, len);
            }
            s
        })
        .collect())
}
