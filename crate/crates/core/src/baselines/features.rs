use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{frame_len, rms, Calibration, RawRecording};
use crate::label::SubjectDay;
use crate::segment::{estimate_pitch, period_range};

/// Statistic order within each measure.
pub const STATISTICS: [&str; 11] = [
    "mean", "std", "skew", "kurtosis", "p5", "p25", "p50", "p75", "p95", "voiced_fraction", "frame_count",
];

pub const FEATURE_COUNT: usize = 2 * STATISTICS.len();

/// `f0_<stat>` for all statistics, then `spl_<stat>`.
pub fn feature_names() -> Vec<String> {
    ["f0", "spl"]
        .iter()
        .flat_map(|m| STATISTICS.iter().map(move |s| format!("{m}_{s}")))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VafConfig {
    pub window_s: f64,
    pub frame_ms: f64,
    /// Frame level (dB) below which a frame is silent.
    pub voicing_threshold_db: f64,
    pub pitch_min_hz: f64,
    pub pitch_max_hz: f64,
}

impl Default for VafConfig {
    fn default() -> Self {
        VafConfig {
            window_s: 300.0,
            frame_ms: 50.0,
            voicing_threshold_db: -40.0,
            pitch_min_hz: 70.0,
            pitch_max_hz: 1000.0,
        }
    }
}

impl VafConfig {
    pub fn validate(&self) -> std::result::Result<(), String> {
        if !(self.window_s > 0.0 && self.frame_ms > 0.0) {
            return Err("window_s and frame_ms must be positive".into());
        }
        if self.frame_ms / 1000.0 > self.window_s {
            return Err("frame_ms must not exceed the window length".into());
        }
        if !(self.pitch_min_hz > 0.0 && self.pitch_max_hz > self.pitch_min_hz) {
            return Err("pitch range must satisfy 0 < min < max".into());
        }
        Ok(())
    }
}

/// Features of one analysis window, or a day mean when `window` is `None`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub id: SubjectDay,
    pub window: Option<usize>,
    pub values: Vec<f64>,
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    // Linear interpolation between closest ranks.
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// The 11 statistics of `xs` given the window's total frame count.
pub fn statistics(xs: &[f64], total_frames: usize) -> [f64; 11] {
    let n = xs.len();
    if n == 0 {
        return [0.0; 11];
    }
    let nf = n as f64;
    let mean = xs.iter().sum::<f64>() / nf;
    let m = |k: i32| xs.iter().map(|x| (x - mean).powi(k)).sum::<f64>() / nf;
    let (m2, m3, m4) = (m(2), m(3), m(4));
    let (skew, kurt) = if m2 > 1e-24 * (1.0 + mean * mean) {
        (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    } else {
        (0.0, 0.0)
    };
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    [
        mean,
        m2.sqrt(),
        skew,
        kurt,
        percentile(&sorted, 0.05),
        percentile(&sorted, 0.25),
        percentile(&sorted, 0.50),
        percentile(&sorted, 0.75),
        percentile(&sorted, 0.95),
        nf / total_frames as f64,
        nf,
    ]
}

/// Frame measures of one window: levels of frames above threshold, and
/// f0 of those frames with a confident pitch.
fn window_measures(frames: &[&[f64]], fs: f64, cal: &Calibration, cfg: &VafConfig) -> (Vec<f64>, Vec<f64>) {
    let range = period_range(cfg.pitch_min_hz, cfg.pitch_max_hz, fs);
    let mut f0 = Vec::new();
    let mut spl = Vec::new();
    for frame in frames {
        let r = rms(frame);
        if r <= 0.0 {
            continue;
        }
        let level = cal.level_db(r);
        if level < cfg.voicing_threshold_db {
            continue;
        }
        spl.push(level);
        if let Ok(p) = estimate_pitch(frame, range) {
            if p.is_confident() {
                f0.push(p.frequency_hz(fs));
            }
        }
    }
    (f0, spl)
}

/// One feature vector per non-overlapping window. The trailing partial
/// window is kept when it holds at least one frame; windows without any
/// pitched frame are dropped.
pub fn compute_vaf(rec: &RawRecording, calibration: Option<Calibration>, cfg: &VafConfig) -> Result<Vec<FeatureVector>> {
    let fs = rec.sample_rate_hz;
    let cal = calibration.unwrap_or_else(Calibration::uncalibrated);
    let flen = frame_len(cfg.frame_ms, fs);
    let frames_per_window = ((cfg.window_s * 1000.0 / cfg.frame_ms).round() as usize).max(1);
    let wlen = flen * frames_per_window;
    let windows: Vec<&[f64]> = rec.samples.chunks(wlen).filter(|w| w.len() >= flen).collect();
    let out: Vec<FeatureVector> = windows
        .par_iter()
        .enumerate()
        .filter_map(|(w, samples)| {
            let frames: Vec<&[f64]> = samples.chunks_exact(flen).collect();
            let (f0, spl) = window_measures(&frames, fs, &cal, cfg);
            if f0.is_empty() {
                return None;
            }
            let mut values = statistics(&f0, frames.len()).to_vec();
            values.extend(statistics(&spl, frames.len()));
            Some(FeatureVector {
                id: rec.id(),
                window: Some(w),
                values,
            })
        })
        .collect();
    if out.is_empty() {
        return Err(Error::EmptyInput("no voiced frames in the recording"));
    }
    Ok(out)
}

/// Feature-wise mean over a subject-day's windows.
pub fn compute_maf(windows: &[FeatureVector]) -> Result<FeatureVector> {
    let first = windows
        .first()
        .ok_or(Error::EmptyInput("no windows to average"))?;
    let mut values = vec![0.0; first.values.len()];
    for w in windows {
        for (acc, v) in values.iter_mut().zip(&w.values) {
            *acc += v;
        }
    }
    let n = windows.len() as f64;
    values.iter_mut().for_each(|v| *v /= n);
    Ok(FeatureVector {
        id: first.id.clone(),
        window: None,
        values,
    })
}

/// Highly correlated feature pairs found over a corpus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PruningReport {
    pub threshold: f64,
    /// `(i, j, r)` with `i < j` and `|r| > threshold`.
    pub correlated_pairs: Vec<(usize, usize, f64)>,
    /// Features a drop-the-later-index rule would remove.
    pub would_drop: Vec<usize>,
    /// Features retained; the base set is always kept whole.
    pub retained: Vec<String>,
}

pub const PRUNING_THRESHOLD: f64 = 0.95;

fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return None;
    }
    Some(sab / (saa * sbb).sqrt())
}

/// Correlation screen over the corpus. Pairs are reported; nothing is removed.
pub fn correlation_pruning(vectors: &[FeatureVector]) -> PruningReport {
    let names = feature_names();
    let d = vectors.first().map_or(0, |v| v.values.len());
    let cols: Vec<Vec<f64>> = (0..d).map(|j| vectors.iter().map(|v| v.values[j]).collect()).collect();
    let mut pairs = Vec::new();
    let mut would_drop = Vec::new();
    if vectors.len() >= 3 {
        for i in 0..d {
            for j in i + 1..d {
                if let Some(r) = pearson(&cols[i], &cols[j]) {
                    if r.abs() > PRUNING_THRESHOLD {
                        pairs.push((i, j, r));
                        if !would_drop.contains(&j) {
                            would_drop.push(j);
                        }
                    }
                }
            }
        }
    }
    would_drop.sort_unstable();
    PruningReport {
        threshold: PRUNING_THRESHOLD,
        correlated_pairs: pairs,
        would_drop,
        retained: names,
    }
}

/// Feature table with a header naming every statistic.
pub fn features_csv(vectors: &[FeatureVector]) -> String {
    let mut out = format!("subject,day,label,window,{}\n", feature_names().join(","));
    for v in vectors {
        let window = v.window.map(|w| w.to_string()).unwrap_or_default();
        let vals: Vec<String> = v.values.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "{},{},{},{window},{}", v.id.subject, v.id.day, v.id.label, vals.join(","));
    }
    out
}
