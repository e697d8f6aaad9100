/// Candidate local maxima, with plateaus reduced to their middle sample
/// (lower middle for even widths). Endpoints are never peaks.
fn local_maxima(xs: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    let n = xs.len();
    let mut i = 1;
    while i + 1 < n {
        if xs[i - 1] < xs[i] {
            let mut ahead = i + 1;
            while ahead + 1 < n && xs[ahead] == xs[i] {
                ahead += 1;
            }
            if xs[ahead] < xs[i] {
                out.push((i + ahead - 1) / 2);
                i = ahead;
                continue;
            }
        }
        i += 1;
    }
    out
}

/// Topographic prominence of the peak at `i`: height above the higher of
/// the two minima reached before climbing to a strictly taller sample
/// (or the region edge) on either side.
pub fn prominence(xs: &[f64], i: usize) -> f64 {
    let h = xs[i];
    let mut left_min = h;
    for &x in xs[..i].iter().rev() {
        if x > h {
            break;
        }
        left_min = left_min.min(x);
    }
    let mut right_min = h;
    for &x in &xs[i + 1..] {
        if x > h {
            break;
        }
        right_min = right_min.min(x);
    }
    h - left_min.max(right_min)
}

/// Amplitude peak picking.
///
/// Keeps local maxima whose prominence reaches `min_prominence`, then
/// suppresses peaks closer than `min_distance` samples to a taller kept
/// peak, visiting peaks from tallest to shortest (ties: lower index first).
/// Result is sorted ascending.
pub fn detect_peaks(region: &[f64], min_prominence: f64, min_distance: usize) -> Vec<usize> {
    if region.len() < 3 {
        return Vec::new();
    }
    let candidates: Vec<usize> = local_maxima(region)
        .into_iter()
        .filter(|&i| prominence(region, i) >= min_prominence)
        .collect();
    if min_distance <= 1 {
        return candidates;
    }

    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| {
        region[candidates[b]]
            .total_cmp(&region[candidates[a]])
            .then(a.cmp(&b))
    });
    let mut keep = vec![true; candidates.len()];
    for &k in &order {
        if !keep[k] {
            continue;
        }
        let pos = candidates[k];
        for j in (0..k).rev() {
            if pos - candidates[j] >= min_distance {
                break;
            }
            keep[j] = false;
        }
        for j in k + 1..candidates.len() {
            if candidates[j] - pos >= min_distance {
                break;
            }
            keep[j] = false;
        }
    }
    candidates
        .into_iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn ramp_has_no_peaks() {
        let ramp: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert!(detect_peaks(&ramp, 0.0, 1).is_empty());
    }

    #[test]
    fn tiny_region_has_no_peaks() {
        assert!(detect_peaks(&[0.0, 1.0], 0.0, 1).is_empty());
    }

    #[test]
    fn sinusoid_peaks_match_brute_force_scan() {
        let fs = 11025.0;
        let xs: Vec<f64> = (0..11025)
            .map(|i| (2.0 * PI * 100.0 * i as f64 / fs).sin())
            .collect();
        // Oracle: every interior sample strictly above both neighbours.
        let oracle: Vec<usize> = (1..xs.len() - 1)
            .filter(|&i| xs[i] > xs[i - 1] && xs[i] > xs[i + 1])
            .collect();
        let peaks = detect_peaks(&xs, 0.5, 50);
        assert_eq!(peaks, oracle);
        assert_eq!(peaks.len(), 100);
        let mean_gap = (peaks[99] - peaks[0]) as f64 / 99.0;
        assert!((mean_gap - 110.25).abs() < 0.05, "{mean_gap}");
    }

    #[test]
    fn equal_peaks_keep_the_first() {
        let mut xs = vec![0.0; 30];
        xs[10] = 1.0;
        xs[15] = 1.0;
        assert_eq!(detect_peaks(&xs, 0.1, 10), vec![10]);
        assert_eq!(detect_peaks(&xs, 0.1, 5), vec![10, 15]);
    }

    #[test]
    fn taller_peak_wins_suppression() {
        let mut xs = vec![0.0; 30];
        xs[10] = 1.0;
        xs[14] = 2.0;
        assert_eq!(detect_peaks(&xs, 0.1, 10), vec![14]);
    }

    #[test]
    fn prominence_filter() {
        // A small ripple on the flank of a big peak.
        let xs = [0.0, 1.0, 0.9, 1.0, 5.0, 0.0];
        assert!((prominence(&xs, 4) - 5.0).abs() < 1e-12);
        assert!((prominence(&xs, 1) - 0.1).abs() < 1e-12);
        assert_eq!(detect_peaks(&xs, 0.5, 1), vec![4]);
    }

    #[test]
    fn plateau_reports_middle() {
        let xs = [0.0, 2.0, 2.0, 2.0, 0.0];
        assert_eq!(detect_peaks(&xs, 0.0, 1), vec![2]);
    }

    proptest! {
        #[test]
        fn contract_holds(
            xs in proptest::collection::vec(-10.0f64..10.0, 3..300),
            prom in 0.0f64..5.0,
            dist in 1usize..20,
        ) {
            let peaks = detect_peaks(&xs, prom, dist);
            for w in peaks.windows(2) {
                prop_assert!(w[1] > w[0]);
                prop_assert!(w[1] - w[0] >= dist);
            }
            for &p in &peaks {
                prop_assert!(p > 0 && p + 1 < xs.len());
                prop_assert!(xs[p] >= xs[p - 1] && xs[p] >= xs[p + 1]);
                prop_assert!(prominence(&xs, p) >= prom);
            }
        }
    }
}
