use serde::{Deserialize, Serialize};

use crate::segment::PulseSegment;

/// Amplitude treatment applied to segments before symbolization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormalizationMode {
    /// Zero mean, unit variance per segment. Used for comparisons across subjects.
    ZScore,
    /// Keep the dbSPL-scaled amplitudes. Used for within-patient comparisons.
    DbSplScaled,
}

impl NormalizationMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            NormalizationMode::ZScore => "zscore",
            NormalizationMode::DbSplScaled => "dbspl",
        }
    }
}

/// Normalize segments in place of their values.
///
/// Under `ZScore` a segment with zero variance has no defined shape and is
/// dropped; the number dropped is returned alongside the survivors.
pub fn normalize_segments(
    segments: Vec<PulseSegment>,
    mode: NormalizationMode,
) -> (Vec<PulseSegment>, usize) {
    match mode {
        NormalizationMode::DbSplScaled => (segments, 0),
        NormalizationMode::ZScore => {
            let before = segments.len();
            let kept: Vec<PulseSegment> = segments
                .into_iter()
                .filter_map(|mut seg| {
                    zscore_in_place(&mut seg.values)?;
                    Some(seg)
                })
                .collect();
            let dropped = before - kept.len();
            if dropped > 0 {
                log::info!("z-score normalization dropped {dropped} constant segment(s)");
            }
            (kept, dropped)
        }
    }
}

/// Returns `None` (leaving `xs` untouched) when the variance is zero.
pub fn zscore_in_place(xs: &mut [f64]) -> Option<()> {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    if !(var > 1e-24 * (1.0 + mean * mean)) {
        return None;
    }
    let sd = var.sqrt();
    for x in xs.iter_mut() {
        *x = (*x - mean) / sd;
    }
    Some(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::segment::PulseSource;
    use proptest::prelude::*;

    fn seg(values: Vec<f64>) -> PulseSegment {
        let raw_length = values.len();
        PulseSegment {
            values,
            source: PulseSource::new("S", 0, 0),
            raw_length,
        }
    }

    fn moments(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        (mean, var)
    }

    #[test]
    fn zscore_of_ramp() {
        let (out, dropped) = normalize_segments(vec![seg(vec![1.0, 2.0, 3.0])], NormalizationMode::ZScore);
        assert_eq!(dropped, 0);
        let (mean, var) = moments(&out[0].values);
        assert!(mean.abs() < 1e-15);
        assert!((var - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constant_segment_dropped() {
        let (out, dropped) = normalize_segments(
            vec![seg(vec![5.0, 5.0, 5.0]), seg(vec![0.0, 1.0])],
            NormalizationMode::ZScore,
        );
        assert_eq!(dropped, 1);
        assert_eq!(out.len(), 1);
    }

    #[test]
    fn dbspl_mode_is_identity() {
        let input = vec![seg(vec![5.0, 5.0, 5.0]), seg(vec![0.0, -3.5])];
        let (out, dropped) = normalize_segments(input.clone(), NormalizationMode::DbSplScaled);
        assert_eq!(out, input);
        assert_eq!(dropped, 0);
    }

    proptest! {
        #[test]
        fn survivors_are_standardized(
            segs in proptest::collection::vec(proptest::collection::vec(-1e3f64..1e3, 2..40), 1..10),
        ) {
            let (out, _) = normalize_segments(segs.into_iter().map(seg).collect(), NormalizationMode::ZScore);
            for s in &out {
                let (mean, var) = moments(&s.values);
                prop_assert!(mean.abs() < 1e-9);
                prop_assert!((var - 1.0).abs() < 1e-9);
            }
        }
    }
}
