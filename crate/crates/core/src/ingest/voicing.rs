//! Frame-energy voicing detection.

use serde::{Deserialize, Serialize};

use super::calibration::rms;
use super::recording::RawRecording;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoicedRegion {
    pub start_sample: usize,
    /// Exclusive.
    pub end_sample: usize,
    pub mean_level_db: f64,
}

impl VoicedRegion {
    pub fn len(&self) -> usize {
        self.end_sample - self.start_sample
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Lower edges, in seconds, of the silence duration bins.
pub const SILENCE_BIN_EDGES_S: [f64; 4] = [1.0, 60.0, 600.0, 3600.0];

/// Counts of silent gaps by duration: `[1 s, 1 min)`, `[1 min, 10 min)`,
/// `[10 min, 1 h)` and `1 h` or more. Gaps under a second are tallied apart.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SilenceProfile {
    pub bin_counts: [u64; 4],
    pub sub_second_gaps: u64,
    pub silent_samples: usize,
}

impl SilenceProfile {
    fn add_gap(&mut self, samples: usize, sample_rate_hz: f64) {
        self.silent_samples += samples;
        let secs = samples as f64 / sample_rate_hz;
        match SILENCE_BIN_EDGES_S.iter().rposition(|&edge| secs >= edge) {
            Some(bin) => self.bin_counts[bin] += 1,
            None => self.sub_second_gaps += 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Voicing {
    pub regions: Vec<VoicedRegion>,
    pub silence: SilenceProfile,
    pub frame_len: usize,
}

/// Frame length in samples for a frame duration, at least one sample.
pub fn frame_len(frame_ms: f64, sample_rate_hz: f64) -> usize {
    ((frame_ms * sample_rate_hz / 1000.0).round() as usize).max(1)
}

/// Split a recording into voiced and silent runs.
///
/// Each frame is voiced when `20 * log10(rms)` of its samples reaches
/// `level_threshold_db`. For a recording scaled with a calibration, that
/// level is already in dbSPL. The trailing partial frame is judged on its
/// own samples. Adjacent frames of the same state are merged.
pub fn detect_voicing(rec: &RawRecording, frame_ms: f64, level_threshold_db: f64) -> Voicing {
    assert!(frame_ms > 0.0, "frame_ms must be positive");
    let flen = frame_len(frame_ms, rec.sample_rate_hz);
    let voiced: Vec<bool> = rec
        .samples
        .chunks(flen)
        .map(|frame| 20.0 * rms(frame).log10() >= level_threshold_db)
        .collect();

    let mut regions = Vec::new();
    let mut silence = SilenceProfile::default();
    let total = rec.samples.len();
    let mut run_start = 0usize;
    for f in 1..=voiced.len() {
        if f < voiced.len() && voiced[f] == voiced[run_start] {
            continue;
        }
        let start = run_start * flen;
        let end = (f * flen).min(total);
        if voiced[run_start] {
            let level = 20.0 * rms(&rec.samples[start..end]).log10();
            regions.push(VoicedRegion {
                start_sample: start,
                end_sample: end,
                mean_level_db: level,
            });
        } else {
            silence.add_gap(end - start, rec.sample_rate_hz);
        }
        run_start = f;
    }
    Voicing {
        regions,
        silence,
        frame_len: flen,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::ClassLabel;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const FS: f64 = 11025.0;

    fn rec(samples: Vec<f64>) -> RawRecording {
        RawRecording::new(samples, FS, "S", 0, ClassLabel::Control).unwrap()
    }

    fn tone(secs: f64, amp: f64) -> Vec<f64> {
        let n = (secs * FS) as usize;
        (0..n).map(|i| amp * (2.0 * PI * 1000.0 * i as f64 / FS).sin()).collect()
    }

    #[test]
    fn all_zero_is_one_silence() {
        let v = detect_voicing(&rec(vec![0.0; 22050]), 50.0, -40.0);
        assert!(v.regions.is_empty());
        assert_eq!(v.silence.bin_counts, [1, 0, 0, 0]);
        assert_eq!(v.silence.silent_samples, 22050);
    }

    #[test]
    fn steady_tone_is_one_region() {
        let v = detect_voicing(&rec(tone(1.0, 0.5)), 50.0, -40.0);
        assert_eq!(v.regions.len(), 1);
        assert_eq!(v.regions[0].start_sample, 0);
        assert_eq!(v.regions[0].end_sample, 11025);
        assert_eq!(v.silence.silent_samples, 0);
    }

    /// Frame-energy oracle written independently of the run-merging code.
    fn oracle_runs(xs: &[f64], flen: usize, thr: f64) -> Vec<(bool, usize, usize)> {
        let mut runs: Vec<(bool, usize, usize)> = Vec::new();
        let mut i = 0;
        while i < xs.len() {
            let end = (i + flen).min(xs.len());
            let e: f64 = xs[i..end].iter().map(|x| x * x).sum::<f64>() / (end - i) as f64;
            let v = 10.0 * e.log10() >= thr;
            match runs.last_mut() {
                Some(last) if last.0 == v => last.2 = end,
                _ => runs.push((v, i, end)),
            }
            i = end;
        }
        runs
    }

    #[test]
    fn two_tones_with_long_gap() {
        let mut xs = tone(2.0, 0.5);
        xs.extend(vec![0.0; (90.0 * FS) as usize]);
        xs.extend(tone(2.0, 0.5));
        let v = detect_voicing(&rec(xs.clone()), 50.0, -40.0);
        assert_eq!(v.regions.len(), 2);
        assert_eq!(v.silence.bin_counts, [0, 1, 0, 0]);

        let runs = oracle_runs(&xs, v.frame_len, -40.0);
        let voiced: Vec<_> = runs.iter().filter(|r| r.0).map(|r| (r.1, r.2)).collect();
        let got: Vec<_> = v.regions.iter().map(|r| (r.start_sample, r.end_sample)).collect();
        assert_eq!(got, voiced);
    }

    proptest! {
        #[test]
        fn regions_and_silence_partition_signal(
            pieces in proptest::collection::vec((any::<bool>(), 1usize..3000), 1..12),
        ) {
            let mut xs = Vec::new();
            for (loud, n) in &pieces {
                let amp = if *loud { 0.3 } else { 0.0 };
                xs.extend((0..*n).map(|i| amp * (i as f64 * 0.7).sin()));
            }
            let v = detect_voicing(&rec(xs.clone()), 50.0, -40.0);
            let voiced: usize = v.regions.iter().map(|r| r.len()).sum();
            prop_assert_eq!(voiced + v.silence.silent_samples, xs.len());
            for w in v.regions.windows(2) {
                prop_assert!(w[0].end_sample < w[1].start_sample);
            }
        }

        #[test]
        fn silence_bins_ignore_amplitude_scaling(
            gaps in proptest::collection::vec(1usize..5, 1..5),
            gain in 0.1f64..10.0,
        ) {
            // Frame-aligned pieces so no frame straddles tone and silence.
            let flen = frame_len(50.0, FS);
            let mut xs = Vec::new();
            for g in &gaps {
                xs.extend(tone(0.2, 0.05).into_iter().take(4 * flen));
                xs.extend(vec![0.0; g * 21 * flen]);
            }
            let base = detect_voicing(&rec(xs.clone()), 50.0, -60.0);
            let scaled: Vec<f64> = xs.iter().map(|x| x * gain).collect();
            let other = detect_voicing(&rec(scaled), 50.0, -60.0);
            prop_assert_eq!(base.silence, other.silence);
        }
    }
}
