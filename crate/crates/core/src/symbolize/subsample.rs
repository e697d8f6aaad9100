use rand::seq::index;

use crate::error::{Error, Result};
use crate::segment::PulseSegment;

/// `min(n_sub, m)` distinct indices drawn uniformly from `0..m`, ascending.
pub fn subsample_indices(m: usize, n_sub: usize, seed: u64) -> Result<Vec<usize>> {
    if m == 0 {
        return Err(Error::EmptyInput("cannot subsample an empty pulse list"));
    }
    if n_sub == 0 {
        return Err(Error::InvalidParameter("subsample size must be positive".into()));
    }
    if n_sub >= m {
        return Ok((0..m).collect());
    }
    let mut rng = crate::seed::rng(seed);
    let mut idx = index::sample(&mut rng, m, n_sub).into_vec();
    idx.sort_unstable();
    Ok(idx)
}

pub fn subsample_pulses(pulses: &[PulseSegment], n_sub: usize, seed: u64) -> Result<Vec<&PulseSegment>> {
    Ok(subsample_indices(pulses.len(), n_sub, seed)?
        .into_iter()
        .map(|i| &pulses[i])
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamps_to_population() {
        assert_eq!(subsample_indices(100, 3000, 1).unwrap(), (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn deterministic_and_distinct() {
        let a = subsample_indices(5000, 3000, 42).unwrap();
        assert_eq!(a, subsample_indices(5000, 3000, 42).unwrap());
        assert_ne!(a, subsample_indices(5000, 3000, 43).unwrap());
        assert_eq!(a.len(), 3000);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert!(*a.last().unwrap() < 5000);
    }

    #[test]
    fn errors() {
        assert!(matches!(subsample_indices(0, 3, 1), Err(Error::EmptyInput(_))));
        assert!(subsample_indices(5, 0, 1).is_err());
    }

    #[test]
    fn chi_square_uniformity() {
        // 1000 draws of 10 out of 50: each index expected 200 times.
        let (m, k, draws) = (50usize, 10usize, 1000u64);
        let mut counts = vec![0u64; m];
        for s in 0..draws {
            for i in subsample_indices(m, k, crate::seed::derive(7, "chi2", &[s])).unwrap() {
                counts[i] += 1;
            }
        }
        let expected = (draws as f64) * k as f64 / m as f64;
        let stat: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // Upper 1% point of chi-square with 49 degrees of freedom.
        const CRITICAL: f64 = 74.91947430847816;
        assert!(stat < CRITICAL, "chi-square {stat}");
    }
}
