use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Warping window constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Band {
    Unbounded,
    /// Sakoe-Chiba radius: cells with `|i - j| <= r` only.
    Radius(usize),
}

impl Band {
    fn radius(self) -> usize {
        match self {
            Band::Unbounded => usize::MAX,
            Band::Radius(r) => r,
        }
    }
}

/// Dynamic time warping distance with squared local cost.
///
/// Returns the square root of the minimum cumulative squared difference over
/// monotone paths with steps (1,0), (0,1), (1,1) joining (0,0) to the last cell.
pub fn dtw(a: &[f64], b: &[f64], band: Band) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("dtw needs two nonempty sequences"));
    }
    let r = band.radius();
    let diff = a.len().abs_diff(b.len());
    if diff > r {
        return Err(Error::BandTooNarrow { radius: r, diff });
    }
    let m = b.len();
    let mut prev = vec![f64::INFINITY; m + 1];
    let mut cur = vec![f64::INFINITY; m + 1];
    prev[0] = 0.0;
    for (i, &x) in a.iter().enumerate() {
        cur.fill(f64::INFINITY);
        let j_lo = i.saturating_sub(r);
        let j_hi = i.saturating_add(r).min(m - 1);
        for j in j_lo..=j_hi {
            let d = x - b[j];
            // cur[j + 1] is cell (i, j); prev holds row i - 1, shifted by one.
            let best = prev[j].min(prev[j + 1]).min(cur[j]);
            cur[j + 1] = d * d + best;
        }
        std::mem::swap(&mut prev, &mut cur);
        // The (0,0) origin only feeds the first row.
        if i == 0 {
            prev[0] = f64::INFINITY;
        }
    }
    Ok(prev[m].sqrt())
}


#[cfg(test)]
mod tests {
    use super::oracle::dtw_by_enumeration;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn self_distance_is_zero() {
        let x = [0.3, -1.0, 2.0, 2.0, 5.5];
        assert_eq!(dtw(&x, &x, Band::Unbounded).unwrap(), 0.0);
        assert_eq!(dtw(&x, &x, Band::Radius(0)).unwrap(), 0.0);
    }

    #[test]
    fn two_by_two() {
        let d = dtw(&[0.0, 0.0], &[1.0, 1.0], Band::Unbounded).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
        assert!((dtw_by_enumeration(&[0.0, 0.0], &[1.0, 1.0], None) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn pure_time_warp_is_free() {
        let a = [0.0, 1.0, 0.0];
        let b = [0.0, 0.0, 1.0, 1.0, 0.0, 0.0];
        assert_eq!(dtw_by_enumeration(&a, &b, None), 0.0);
        assert_eq!(dtw(&a, &b, Band::Unbounded).unwrap(), 0.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(dtw(&[], &[1.0], Band::Unbounded), Err(Error::EmptyInput(_))));
        assert!(matches!(
            dtw(&[1.0], &[1.0, 2.0, 3.0], Band::Radius(1)),
            Err(Error::BandTooNarrow { radius: 1, diff: 2 })
        ));
    }

    proptest! {
        #[test]
        fn matches_enumeration(
            a in proptest::collection::vec(-5.0f64..5.0, 1..7),
            b in proptest::collection::vec(-5.0f64..5.0, 1..7),
            r in 0usize..8,
        ) {
            let band = if r == 7 { Band::Unbounded } else { Band::Radius(r) };
            let radius = if r == 7 { None } else { Some(r) };
            match dtw(&a, &b, band) {
                Ok(d) => {
                    let want = dtw_by_enumeration(&a, &b, radius);
                    prop_assert!((d - want).abs() <= 1e-12 * (1.0 + want), "{} vs {}", d, want);
                }
                Err(Error::BandTooNarrow { .. }) => prop_assert!(a.len().abs_diff(b.len()) > r),
                Err(e) => prop_assert!(false, "unexpected {e}"),
            }
        }

        #[test]
        fn symmetric_nonnegative_and_band_monotone(
            a in proptest::collection::vec(-5.0f64..5.0, 12),
            b in proptest::collection::vec(-5.0f64..5.0, 12),
            r in 0usize..12,
        ) {
            let ab = dtw(&a, &b, Band::Radius(r)).unwrap();
            let ba = dtw(&b, &a, Band::Radius(r)).unwrap();
            prop_assert!(ab >= 0.0);
            prop_assert!((ab - ba).abs() <= 1e-12 * (1.0 + ab));
            let free = dtw(&a, &b, Band::Unbounded).unwrap();
            prop_assert!(free <= ab + 1e-12);
        }
    }
}
