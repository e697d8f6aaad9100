//! Peak-to-peak pulse segmentation.
//!
//! Per voiced region: estimate the pitch period, pick amplitude peaks at
//! least most of a period apart, repair the peak train against the period,
//! and cut half-open pulses between consecutive peaks. Pulses from all
//! regions of a subject-day are then resampled to one common length.

mod correct;
mod dump;
mod peaks;
mod pitch;
mod pulses;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use correct::correct_peaks;
pub use dump::{index_path, read_segment_dump, write_segment_csv, write_segment_dump, SegmentSet};
pub use peaks::{detect_peaks, prominence};
pub use pitch::{
    estimate_pitch, normalized_autocorrelation, period_range, PitchEstimate, LOW_CONFIDENCE,
    MAX_ANALYSIS_SAMPLES,
};
pub use pulses::{length_normalize, resample_linear, segment_pulses, PulseSegment, PulseSource, TargetLength};

use crate::error::Result;
use crate::ingest::{
    apply_calibration, detect_voicing, normalize_segments, Calibration, NormalizationMode,
    RawRecording, SilenceProfile,
};

/// Whether each voiced region gets its own pitch estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PitchScope {
    /// Own estimate per region; unreliable regions fall back to the day median.
    PerRegion,
    /// Median of the reliable regional estimates for every region.
    PerDay,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SegmentationConfig {
    pub frame_ms: f64,
    /// Frame level threshold for voicing, in dB of the (possibly calibrated) signal.
    pub voicing_threshold_db: f64,
    pub pitch_min_hz: f64,
    pub pitch_max_hz: f64,
    pub pitch_scope: PitchScope,
    /// Minimum peak prominence as a fraction of the region's peak-to-peak range.
    pub peak_prominence: f64,
    /// Minimum peak separation as a fraction of the pitch period.
    pub peak_min_distance: f64,
    pub correction_tolerance: f64,
    /// Upper bound on the automatic common length.
    pub max_length: Option<usize>,
}

impl Default for SegmentationConfig {
    fn default() -> Self {
        SegmentationConfig {
            frame_ms: 50.0,
            voicing_threshold_db: -40.0,
            pitch_min_hz: 70.0,
            pitch_max_hz: 1000.0,
            pitch_scope: PitchScope::PerRegion,
            peak_prominence: 0.1,
            peak_min_distance: 0.7,
            correction_tolerance: 0.3,
            max_length: None,
        }
    }
}

impl SegmentationConfig {
    pub fn validate(&self) -> std::result::Result<(), String> {
        if !(self.frame_ms > 0.0) {
            return Err(format!("frame_ms must be positive, got {}", self.frame_ms));
        }
        if !(self.pitch_min_hz > 0.0 && self.pitch_max_hz > self.pitch_min_hz) {
            return Err(format!(
                "pitch range must satisfy 0 < min < max, got {}..{}",
                self.pitch_min_hz, self.pitch_max_hz
            ));
        }
        if !(self.correction_tolerance > 0.0 && self.correction_tolerance < 1.0) {
            return Err(format!(
                "correction_tolerance must lie in (0, 1), got {}",
                self.correction_tolerance
            ));
        }
        if !(self.peak_prominence >= 0.0) {
            return Err("peak_prominence must be nonnegative".into());
        }
        if !(self.peak_min_distance >= 0.0) {
            return Err("peak_min_distance must be nonnegative".into());
        }
        if matches!(self.max_length, Some(n) if n < 2) {
            return Err("max_length must be at least 2".into());
        }
        Ok(())
    }
}

/// Per-region bookkeeping, kept for reports and tests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionSummary {
    pub start_sample: usize,
    pub end_sample: usize,
    pub pitch: Option<PitchEstimate>,
    pub peaks: usize,
    pub pulses: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Segmentation {
    pub set: SegmentSet,
    pub regions: Vec<RegionSummary>,
    pub silence: SilenceProfile,
    /// Segments removed by z-scoring because they were constant.
    pub dropped_constant: usize,
}

fn median(xs: &mut [f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    Some(if xs.len() % 2 == 1 {
        xs[m]
    } else {
        0.5 * (xs[m - 1] + xs[m])
    })
}

/// Pulses of one region given its pitch estimate, before length normalization.
pub fn region_pulses(
    region: &[f64],
    pitch: &PitchEstimate,
    cfg: &SegmentationConfig,
    subject_id: &str,
    day_index: u32,
    offset: usize,
) -> (Vec<usize>, Vec<PulseSegment>) {
    if region.len() < 3 {
        return (Vec::new(), Vec::new());
    }
    let (lo, hi) = region
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let min_prom = cfg.peak_prominence * (hi - lo);
    let min_dist = ((cfg.peak_min_distance * pitch.period_samples).floor() as usize).max(1);
    let raw = detect_peaks(region, min_prom, min_dist);
    let fixed = correct_peaks(&raw, pitch, cfg.correction_tolerance, region);
    let pulses = segment_pulses(region, &fixed, subject_id, day_index, offset);
    (fixed, pulses)
}

/// Run voicing detection and pulse segmentation on one recording.
///
/// `calibration` (when given) is applied before voicing detection.
/// Output segments are length-normalized and then amplitude-normalized
/// according to `mode`. Regions are processed in parallel and concatenated
/// in region order, so the result does not depend on thread count.
pub fn segment_recording(
    rec: &RawRecording,
    calibration: Option<Calibration>,
    mode: NormalizationMode,
    cfg: &SegmentationConfig,
) -> Result<Segmentation> {
    let scaled;
    let rec = match calibration {
        Some(cal) => {
            scaled = apply_calibration(rec, cal);
            &scaled
        }
        None => rec,
    };
    let voicing = detect_voicing(rec, cfg.frame_ms, cfg.voicing_threshold_db);
    let range = period_range(cfg.pitch_min_hz, cfg.pitch_max_hz, rec.sample_rate_hz);

    let own: Vec<Option<PitchEstimate>> = voicing
        .regions
        .par_iter()
        .map(|r| estimate_pitch(&rec.samples[r.start_sample..r.end_sample], range).ok())
        .collect();
    let mut confident: Vec<f64> = own
        .iter()
        .flatten()
        .filter(|p| p.is_confident())
        .map(|p| p.period_samples)
        .collect();
    let day_period = median(&mut confident);
    let day_pitch = day_period.map(|period_samples| PitchEstimate {
        period_samples,
        valid_range: range,
        confidence: 1.0,
    });

    let chosen: Vec<Option<PitchEstimate>> = own
        .into_iter()
        .map(|p| match cfg.pitch_scope {
            PitchScope::PerDay => day_pitch.or(p),
            PitchScope::PerRegion => match p {
                Some(p) if p.is_confident() => Some(p),
                other => day_pitch.or(other),
            },
        })
        .collect();

    let per_region: Vec<(RegionSummary, Vec<PulseSegment>)> = voicing
        .regions
        .par_iter()
        .zip(chosen.par_iter())
        .map(|(r, pitch)| {
            let region = &rec.samples[r.start_sample..r.end_sample];
            let (peaks, pulses) = match pitch {
                Some(p) => region_pulses(region, p, cfg, &rec.subject_id, rec.day_index, r.start_sample),
                None => (Vec::new(), Vec::new()),
            };
            let summary = RegionSummary {
                start_sample: r.start_sample,
                end_sample: r.end_sample,
                pitch: *pitch,
                peaks: peaks.len(),
                pulses: pulses.len(),
            };
            (summary, pulses)
        })
        .collect();

    let mut regions = Vec::with_capacity(per_region.len());
    let mut segments = Vec::new();
    for (summary, pulses) in per_region {
        regions.push(summary);
        segments.extend(pulses);
    }
    let (segments, dropped_constant) = if segments.is_empty() {
        (segments, 0)
    } else {
        let target = TargetLength::Auto { cap: cfg.max_length };
        normalize_segments(length_normalize(segments, target)?, mode)
    };
    Ok(Segmentation {
        set: SegmentSet {
            id: rec.id(),
            segments,
        },
        regions,
        silence: voicing.silence,
        dropped_constant,
    })
}
