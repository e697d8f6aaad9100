use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this peak normalized autocorrelation an estimate is flagged unreliable.
pub const LOW_CONFIDENCE: f64 = 0.3;

/// Longest stretch of a region that is analysed. Longer regions use their
/// leading samples only.
pub const MAX_ANALYSIS_SAMPLES: usize = 16_384;

/// A candidate lag within this fraction of the best correlation is preferred
/// when it is shorter, so that period multiples do not win on rounding noise.
const OCTAVE_GUARD: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PitchEstimate {
    pub period_samples: f64,
    pub valid_range: (f64, f64),
    /// Normalized autocorrelation at the chosen lag.
    pub confidence: f64,
}

impl PitchEstimate {
    pub fn is_confident(&self) -> bool {
        self.confidence >= LOW_CONFIDENCE
    }

    pub fn frequency_hz(&self, sample_rate_hz: f64) -> f64 {
        sample_rate_hz / self.period_samples
    }
}

/// Period range in samples for a pitch range in Hz.
pub fn period_range(min_hz: f64, max_hz: f64, sample_rate_hz: f64) -> (f64, f64) {
    (sample_rate_hz / max_hz, sample_rate_hz / min_hz)
}

/// Normalized autocorrelation of the mean-removed signal at `lag`.
pub fn normalized_autocorrelation(xs: &[f64], lag: usize) -> f64 {
    let n = xs.len();
    if lag >= n {
        return 0.0;
    }
    let (mut num, mut e0, mut e1) = (0.0, 0.0, 0.0);
    for t in 0..n - lag {
        let a = xs[t];
        let b = xs[t + lag];
        num += a * b;
        e0 += a * a;
        e1 += b * b;
    }
    let den = (e0 * e1).sqrt();
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Estimate the fundamental period of a voiced stretch.
///
/// Scans integer lags in `valid_range` for the normalized autocorrelation
/// maximum, takes the shortest local maximum reaching 90 % of it, and
/// refines the lag by parabolic interpolation.
pub fn estimate_pitch(region: &[f64], valid_range: (f64, f64)) -> Result<PitchEstimate> {
    let (min_p, max_p) = valid_range;
    if !(min_p >= 1.0 && max_p >= min_p) {
        return Err(Error::InvalidParameter(format!(
            "invalid period range ({min_p}, {max_p})"
        )));
    }
    let needed = (2.0 * max_p).ceil() as usize;
    if region.len() < needed {
        return Err(Error::InsufficientPitchData {
            needed,
            got: region.len(),
        });
    }
    let n = region.len().min(MAX_ANALYSIS_SAMPLES.max(needed));
    let mean = region[..n].iter().sum::<f64>() / n as f64;
    let xs: Vec<f64> = region[..n].iter().map(|x| x - mean).collect();

    let lo = (min_p.ceil() as usize).max(2);
    let hi = (max_p.floor() as usize).max(lo);
    // One lag of margin on each side for the local-max test and interpolation.
    let first = lo - 1;
    let last = hi + 1;
    let r: Vec<f64> = (first..=last)
        .map(|lag| normalized_autocorrelation(&xs, lag))
        .collect();
    let at = |lag: usize| r[lag - first];

    let best = (lo..=hi)
        .max_by(|&a, &b| at(a).total_cmp(&at(b)).then(b.cmp(&a)))
        .unwrap_or(lo);
    let best_r = at(best);
    let chosen = if best_r > 0.0 {
        (lo..=hi)
            .find(|&lag| {
                at(lag) >= OCTAVE_GUARD * best_r && at(lag) >= at(lag - 1) && at(lag) >= at(lag + 1)
            })
            .unwrap_or(best)
    } else {
        best
    };

    let (y0, y1, y2) = (at(chosen - 1), at(chosen), at(chosen + 1));
    let denom = y0 - 2.0 * y1 + y2;
    let shift = if denom < 0.0 {
        (0.5 * (y0 - y2) / denom).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    let period = (chosen as f64 + shift).clamp(min_p, max_p);
    Ok(PitchEstimate {
        period_samples: period,
        valid_range,
        confidence: y1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use std::f64::consts::PI;

    const FS: f64 = 11025.0;

    fn tone(hz: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| (2.0 * PI * hz * i as f64 / FS).sin()).collect()
    }

    #[test]
    fn pure_tone_period() {
        let xs = tone(100.0, 4000);
        let range = period_range(70.0, 1000.0, FS);
        let est = estimate_pitch(&xs, range).unwrap();

        // Brute-force oracle: plain argmax over integer lags.
        let lo = range.0.ceil() as usize;
        let hi = range.1.floor() as usize;
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let centered: Vec<f64> = xs.iter().map(|x| x - mean).collect();
        let oracle = (lo..=hi)
            .max_by(|&a, &b| {
                normalized_autocorrelation(&centered, a).total_cmp(&normalized_autocorrelation(&centered, b))
            })
            .unwrap();
        assert_eq!(oracle, 110);
        assert!((est.period_samples - 110.0).abs() <= 1.0, "{}", est.period_samples);
        assert!((est.period_samples - 110.25).abs() < 0.3);
        assert!(est.is_confident());
    }

    #[test]
    fn fractional_period_does_not_jump_an_octave() {
        // 200.5 Hz puts the period near 55 samples, with 110 also in range.
        let xs = tone(200.5, 4000);
        let est = estimate_pitch(&xs, period_range(70.0, 1000.0, FS)).unwrap();
        assert!((est.period_samples - FS / 200.5).abs() < 0.5, "{}", est.period_samples);
    }

    #[test]
    fn white_noise_is_low_confidence() {
        let mut rng = crate::seed::rng(11);
        let xs: Vec<f64> = (0..8000).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let range = period_range(70.0, 1000.0, FS);
        let est = estimate_pitch(&xs, range).unwrap();
        assert!(est.period_samples >= range.0 && est.period_samples <= range.1);
        assert!(!est.is_confident(), "confidence {}", est.confidence);
    }

    #[test]
    fn one_period_is_too_short() {
        let range = period_range(70.0, 1000.0, FS);
        let xs = tone(100.0, range.1 as usize);
        assert!(matches!(
            estimate_pitch(&xs, range),
            Err(Error::InsufficientPitchData { .. })
        ));
    }
}
