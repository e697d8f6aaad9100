use super::pitch::PitchEstimate;

/// Repair a peak list using the expected pitch period.
///
/// Spurious peaks, closer than `(1 - tolerance) * period` to the previous
/// kept peak, are dropped (the earlier one survives). Gaps longer than
/// `(1 + tolerance) * period` receive `round(gap / period) - 1` inserted
/// peaks, each placed on the tallest sample of `signal` within
/// `tolerance * period` of its evenly spaced nominal position, never closer
/// than `(1 - tolerance) * period` to its neighbours. `signal` is the
/// region the peak indices point into.
///
/// Every gap in the output lies in `[(1 - tol) * period, 2 * (1 + tol) * period]`.
pub fn correct_peaks(
    peaks: &[usize],
    pitch: &PitchEstimate,
    tolerance: f64,
    signal: &[f64],
) -> Vec<usize> {
    assert!(
        tolerance > 0.0 && tolerance < 1.0,
        "tolerance must lie in (0, 1)"
    );
    let period = pitch.period_samples;
    let min_gap = ((1.0 - tolerance) * period).ceil() as usize;

    let mut kept: Vec<usize> = Vec::with_capacity(peaks.len());
    for &p in peaks {
        match kept.last() {
            Some(&last) if ((p - last) as f64) < (1.0 - tolerance) * period => {}
            _ => kept.push(p),
        }
    }

    let mut out = Vec::with_capacity(kept.len());
    let reach = tolerance * period;
    for w in kept.windows(2) {
        let (a, b) = (w[0], w[1]);
        out.push(a);
        let gap = b - a;
        if (gap as f64) <= (1.0 + tolerance) * period {
            continue;
        }
        // Number of sub-intervals: nearest to the period count, but never so
        // many that an even integer split falls below `min_gap`.
        let parts = ((gap as f64 / period).round() as usize)
            .min(gap / min_gap.max(1))
            .max(1);
        let nominal = |k: usize| a + k * gap / parts;
        let mut prev = a;
        for k in 1..parts {
            let lo = ((nominal(k) as f64 - reach).ceil().max(0.0) as usize).max(prev + min_gap);
            let hi = ((nominal(k) as f64 + reach).floor() as usize).min(nominal(k + 1) - min_gap);
            let pick = (lo..=hi.min(signal.len().saturating_sub(1)))
                .max_by(|&x, &y| signal[x].total_cmp(&signal[y]).then(y.cmp(&x)))
                .unwrap_or(nominal(k));
            out.push(pick);
            prev = pick;
        }
    }
    if let Some(&last) = kept.last() {
        out.push(last);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::segment::peaks::detect_peaks;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const FS: f64 = 11025.0;

    fn pitch(period: f64) -> PitchEstimate {
        PitchEstimate {
            period_samples: period,
            valid_range: (11.0, 158.0),
            confidence: 1.0,
        }
    }

    fn train() -> (Vec<f64>, Vec<usize>) {
        let xs: Vec<f64> = (0..11025)
            .map(|i| (2.0 * PI * 100.0 * i as f64 / FS).sin())
            .collect();
        let peaks = detect_peaks(&xs, 0.5, 50);
        (xs, peaks)
    }

    #[test]
    fn clean_train_unchanged() {
        let (xs, peaks) = train();
        assert_eq!(correct_peaks(&peaks, &pitch(110.25), 0.3, &xs), peaks);
    }

    #[test]
    fn deleted_peak_is_restored() {
        let (xs, peaks) = train();
        let mut damaged = peaks.clone();
        damaged.remove(50);
        let fixed = correct_peaks(&damaged, &pitch(110.25), 0.3, &xs);
        assert_eq!(fixed.len(), peaks.len());
        assert_eq!(fixed, peaks);
    }

    #[test]
    fn injected_peak_is_removed() {
        let (xs, peaks) = train();
        let mut noisy = peaks.clone();
        noisy.insert(31, peaks[30] + 55);
        assert_eq!(correct_peaks(&noisy, &pitch(110.25), 0.3, &xs), peaks);
    }

    #[test]
    fn several_missing_peaks_are_filled() {
        let (xs, peaks) = train();
        let damaged: Vec<usize> = peaks
            .iter()
            .enumerate()
            .filter(|(i, _)| !(20..24).contains(i))
            .map(|(_, &p)| p)
            .collect();
        assert_eq!(correct_peaks(&damaged, &pitch(110.25), 0.3, &xs), peaks);
    }

    proptest! {
        #[test]
        fn gaps_within_bounds(
            mut raw in proptest::collection::vec(0usize..5000, 2..80),
            period in 20.0f64..150.0,
            tol in 0.05f64..0.6,
            seed in any::<u64>(),
        ) {
            raw.sort_unstable();
            raw.dedup();
            let signal: Vec<f64> = (0..5000)
                .map(|i| ((i as u64).wrapping_mul(seed | 1) % 97) as f64)
                .collect();
            let out = correct_peaks(&raw, &pitch(period), tol, &signal);
            for w in out.windows(2) {
                let gap = (w[1] - w[0]) as f64;
                prop_assert!(gap >= (1.0 - tol) * period, "gap {} below bound", gap);
                prop_assert!(gap <= 2.0 * (1.0 + tol) * period, "gap {} above bound", gap);
            }
        }
    }
}
