use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Running max/min of a query over a window of `band_radius` on each side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    pub band_radius: usize,
}

impl Envelope {
    pub fn len(&self) -> usize {
        self.upper.len()
    }

    pub fn is_empty(&self) -> bool {
        self.upper.is_empty()
    }
}

/// Sliding-window envelope in linear time (monotonic deques).
pub fn build_envelope(q: &[f64], band_radius: usize) -> Envelope {
    let n = q.len();
    let mut upper = Vec::with_capacity(n);
    let mut lower = Vec::with_capacity(n);
    let mut maxq: VecDeque<usize> = VecDeque::new();
    let mut minq: VecDeque<usize> = VecDeque::new();
    let mut next = 0usize;
    for i in 0..n {
        let hi = i.saturating_add(band_radius).min(n - 1);
        while next <= hi {
            while maxq.back().is_some_and(|&k| q[k] <= q[next]) {
                maxq.pop_back();
            }
            maxq.push_back(next);
            while minq.back().is_some_and(|&k| q[k] >= q[next]) {
                minq.pop_back();
            }
            minq.push_back(next);
            next += 1;
        }
        let lo = i.saturating_sub(band_radius);
        while maxq.front().is_some_and(|&k| k < lo) {
            maxq.pop_front();
        }
        while minq.front().is_some_and(|&k| k < lo) {
            minq.pop_front();
        }
        upper.push(q[maxq[0]]);
        lower.push(q[minq[0]]);
    }
    Envelope {
        upper,
        lower,
        band_radius,
    }
}

/// Keogh lower bound of `c` against the envelope of a query of equal length.
pub fn lb_keogh(c: &[f64], env: &Envelope) -> Result<f64> {
    if c.len() != env.len() {
        return Err(Error::LengthMismatch {
            expected: env.len(),
            got: c.len(),
        });
    }
    Ok(lb_keogh_sq(c, env).sqrt())
}

/// Sum of squared envelope excursions, without the final root. Lengths must match.
#[inline]
pub(crate) fn lb_keogh_sq(c: &[f64], env: &Envelope) -> f64 {
    c.iter()
        .zip(env.upper.iter().zip(&env.lower))
        .map(|(&x, (&u, &l))| {
            if x > u {
                (x - u) * (x - u)
            } else if x < l {
                (x - l) * (x - l)
            } else {
                0.0
            }
        })
        .sum()
}

/// `max(lb_keogh(a, env(b)), lb_keogh(b, env(a)))`, a symmetric lower bound on banded DTW.
pub fn symmetric_lb_keogh(a: &[f64], env_a: &Envelope, b: &[f64], env_b: &Envelope) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(symmetric_lb_keogh_unchecked(a, env_a, b, env_b))
}

#[inline]
pub(crate) fn symmetric_lb_keogh_unchecked(a: &[f64], env_a: &Envelope, b: &[f64], env_b: &Envelope) -> f64 {
    lb_keogh_sq(a, env_b).max(lb_keogh_sq(b, env_a)).sqrt()
}

/// Convenience form that builds both envelopes.
pub fn lb_keogh_distance(a: &[f64], b: &[f64], band_radius: usize) -> Result<f64> {
    symmetric_lb_keogh(a, &build_envelope(a, band_radius), b, &build_envelope(b, band_radius))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::dtw::{dtw, oracle::dtw_by_enumeration, Band};
    use proptest::prelude::*;

    /// Direct windowed min/max, quadratic.
    fn naive_envelope(q: &[f64], r: usize) -> (Vec<f64>, Vec<f64>) {
        let n = q.len();
        (0..n)
            .map(|i| {
                let w = &q[i.saturating_sub(r)..=(i + r).min(n - 1)];
                (
                    w.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                    w.iter().cloned().fold(f64::INFINITY, f64::min),
                )
            })
            .unzip()
    }

    #[test]
    fn zero_radius_is_identity() {
        let q = [1.0, -2.0, 3.5];
        let env = build_envelope(&q, 0);
        assert_eq!(env.upper, q.to_vec());
        assert_eq!(env.lower, q.to_vec());
    }

    #[test]
    fn spike_envelope() {
        let env = build_envelope(&[0.0, 10.0, 0.0], 1);
        assert_eq!(env.upper, vec![10.0, 10.0, 10.0]);
        assert_eq!(env.lower, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn constant_envelope() {
        let q = [4.0; 9];
        for r in [0, 1, 3, 20] {
            let env = build_envelope(&q, r);
            assert_eq!(env.upper, q.to_vec());
            assert_eq!(env.lower, q.to_vec());
        }
    }

    #[test]
    fn inside_envelope_costs_nothing() {
        let q = [0.0, 10.0, 0.0];
        let env = build_envelope(&q, 1);
        assert_eq!(lb_keogh(&[5.0, 1.0, 9.0], &env).unwrap(), 0.0);
    }

    #[test]
    fn constant_offset() {
        let env = build_envelope(&[0.0, 0.0, 0.0], 0);
        assert!((lb_keogh(&[2.0, 2.0, 2.0], &env).unwrap() - 12f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn length_mismatch() {
        let env = build_envelope(&[0.0, 0.0], 0);
        assert!(matches!(lb_keogh(&[1.0], &env), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn random_pair_bounded_by_dtw() {
        let mut rng = crate::seed::rng(64);
        use rand::Rng;
        let a: Vec<f64> = (0..64).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..64).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let lb = lb_keogh(&a, &build_envelope(&b, 6)).unwrap();
        let d = dtw(&a, &b, Band::Radius(6)).unwrap();
        assert!(lb <= d + 1e-9);
    }

    proptest! {
        #[test]
        fn envelope_matches_naive(q in proptest::collection::vec(-50.0f64..50.0, 1..80), r in 0usize..30) {
            let env = build_envelope(&q, r);
            let (up, lo) = naive_envelope(&q, r);
            prop_assert_eq!(&env.upper, &up);
            prop_assert_eq!(&env.lower, &lo);
            for i in 0..q.len() {
                prop_assert!(env.lower[i] <= q[i] && q[i] <= env.upper[i]);
            }
        }

        #[test]
        fn symmetric_bound_below_dtw(
            pair in (1usize..9).prop_flat_map(|n| (
                proptest::collection::vec(-3.0f64..3.0, n),
                proptest::collection::vec(-3.0f64..3.0, n),
                0usize..n,
            )),
        ) {
            let (a, b, r) = pair;
            let lb = lb_keogh_distance(&a, &b, r).unwrap();
            let d = dtw_by_enumeration(&a, &b, Some(r));
            prop_assert!(lb <= d + 1e-9, "{} > {}", lb, d);
            // Full-width band: the flat envelope still bounds DTW.
            let flat = lb_keogh_distance(&a, &b, a.len() - 1).unwrap();
            prop_assert!(flat <= dtw(&a, &b, Band::Unbounded).unwrap() + 1e-9);
        }
    }
}
