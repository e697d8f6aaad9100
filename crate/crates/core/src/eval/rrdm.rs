use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::concentration::{total_concentration, ClusterAssignment, ConcentrationMetric};
use crate::distance::{DistanceMatrix, Matrix};
use crate::error::{Error, Result};
use crate::symbolize::{cut_to_n, ward_cluster};

/// Ward clustering of the matrix rows, cut to exactly `n` clusters.
pub fn cluster_subject_days(dm: &DistanceMatrix, n: usize) -> Result<ClusterAssignment> {
    if n == 0 || n > dm.len() {
        return Err(Error::TooManyClusters {
            requested: n,
            available: dm.len(),
        });
    }
    let cut = cut_to_n(&ward_cluster(&dm.values)?, n)?;
    ClusterAssignment::new(dm.ids.clone(), cut.labels, n)
}

/// Null distribution of total class concentration under random distances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RrdmResult {
    pub n: usize,
    pub trials: usize,
    pub observed: f64,
    /// Concentration from each trial, in trial order.
    pub samples: Vec<f64>,
    pub p_value: f64,
    /// True when no sample reached the observed value, so `p` is only
    /// known to be below `1 / trials`.
    pub below_resolution: bool,
}

impl RrdmResult {
    pub fn p_display(&self) -> String {
        if self.below_resolution {
            format!("< {}", 1.0 / self.trials as f64)
        } else {
            format!("{}", self.p_value)
        }
    }

    pub fn sorted_samples(&self) -> Vec<f64> {
        let mut s = self.samples.clone();
        s.sort_by(f64::total_cmp);
        s
    }

    /// Smallest sample value whose p would fall below `alpha`.
    pub fn threshold(&self, alpha: f64) -> Option<f64> {
        let sorted = self.sorted_samples();
        let t = sorted.len() as f64;
        sorted
            .iter()
            .copied()
            .find(|&x| (sorted.len() - sorted.partition_point(|&s| s <= x)) as f64 / t < alpha)
    }

    pub fn sample_sd(&self) -> f64 {
        let t = self.samples.len() as f64;
        if t < 2.0 {
            return 0.0;
        }
        let mean = self.samples.iter().sum::<f64>() / t;
        (self.samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (t - 1.0)).sqrt()
    }
}

/// `1 - #(samples <= observed) / trials`, computed as `#(samples > observed) / trials`
/// so that p is an exact multiple of `1 / trials`.
pub fn ecdf_p_value(samples: &[f64], observed: f64) -> f64 {
    let above = samples.iter().filter(|&&s| s > observed).count();
    above as f64 / samples.len() as f64
}

/// Symmetric, zero-diagonal matrix with i.i.d. uniform upper-triangle entries on `[0, max]`.
pub fn random_distance_matrix(q: usize, max: f64, seed: u64) -> Matrix {
    let mut rng = crate::seed::rng(seed);
    let mut m = Matrix::zeros(q, q);
    for i in 0..q {
        for j in i + 1..q {
            let v = if max > 0.0 { rng.gen_range(0.0..=max) } else { 0.0 };
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    m
}

/// Compare the observed clustering's total class concentration with
/// `trials` random distance matrices clustered to the same `n`.
pub fn rrdm_significance(dm: &DistanceMatrix, n: usize, trials: usize, seed: u64) -> Result<RrdmResult> {
    if trials == 0 {
        return Err(Error::InvalidParameter("RRDM needs at least one trial".into()));
    }
    let observed = total_concentration(&cluster_subject_days(dm, n)?, ConcentrationMetric::Class)?;
    let max = dm.values.max();
    let q = dm.len();
    let samples = (0..trials)
        .into_par_iter()
        .map(|t| {
            let m = random_distance_matrix(q, max, crate::seed::derive(seed, "rrdm", &[t as u64]));
            let cut = cut_to_n(&ward_cluster(&m)?, n)?;
            let a = ClusterAssignment::new(dm.ids.clone(), cut.labels, n)?;
            total_concentration(&a, ConcentrationMetric::Class)
        })
        .collect::<Result<Vec<f64>>>()?;
    let p_value = ecdf_p_value(&samples, observed);
    Ok(RrdmResult {
        n,
        trials,
        observed,
        below_resolution: p_value == 0.0,
        samples,
        p_value,
    })
}
