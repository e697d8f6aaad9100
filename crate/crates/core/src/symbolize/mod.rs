//! Per-day symbolization: subsample the pulses, cluster the subsample with
//! Ward's linkage, pick k from a dendrogram cut, then refine over every
//! pulse with k-means. Each day is symbolized on its own.

mod kmeans;
mod subsample;
mod vector;
mod ward;

use serde::{Deserialize, Serialize};

pub use kmeans::{kmeans, AssignMetric, KMeansOutcome};
pub use subsample::{subsample_indices, subsample_pulses};
pub use vector::{
    parse_symbol_vectors, read_symbol_vectors, write_symbol_vectors, Symbol, SymbolVector,
    FREQUENCY_SUM_TOLERANCE,
};
pub use ward::{cut_dendrogram, cut_to_n, ward_cluster, Cut, Dendrogram, Merge};

use crate::distance::{self_distances, BandRule};
use crate::error::{Error, Result};
use crate::label::SubjectDay;
use crate::segment::SegmentSet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SymbolizeConfig {
    pub subsample_size: usize,
    /// Dendrogram cut as a fraction of the tallest merge.
    pub cut_fraction: f64,
    /// Fixed symbol count; overrides `cut_fraction` when set.
    pub n_symbols: Option<usize>,
    pub band: BandRule,
    pub metric: AssignMetric,
    pub max_iter: usize,
}

impl Default for SymbolizeConfig {
    fn default() -> Self {
        SymbolizeConfig {
            subsample_size: 3000,
            cut_fraction: 0.30,
            n_symbols: None,
            band: BandRule::default(),
            metric: AssignMetric::LbKeogh,
            max_iter: 100,
        }
    }
}

impl SymbolizeConfig {
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.subsample_size == 0 {
            return Err("subsample_size must be positive".into());
        }
        if !(self.cut_fraction > 0.0 && self.cut_fraction <= 1.0) {
            return Err(format!("cut_fraction must lie in (0, 1], got {}", self.cut_fraction));
        }
        if self.n_symbols == Some(0) {
            return Err("n_symbols must be positive".into());
        }
        if let BandRule::Fraction(f) = self.band {
            if !(f >= 0.0) {
                return Err("band fraction must be nonnegative".into());
            }
        }
        Ok(())
    }
}

/// Diagnostics from one day's symbolization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolizeReport {
    pub pulses: usize,
    pub subsample: usize,
    pub k_from_cut: usize,
    pub band_radius: usize,
    pub iterations: usize,
    pub converged: bool,
    pub reverted: bool,
    pub objective: Vec<f64>,
}

/// Pointwise mean of each cut cluster over the subsample.
pub fn initial_centroids(sample: &[&[f64]], cut: &Cut) -> Vec<Vec<f64>> {
    let len = sample.first().map_or(0, |s| s.len());
    let mut sums = vec![vec![0.0; len]; cut.k];
    let mut counts = vec![0usize; cut.k];
    for (s, &l) in sample.iter().zip(&cut.labels) {
        counts[l] += 1;
        for (acc, v) in sums[l].iter_mut().zip(s.iter()) {
            *acc += v;
        }
    }
    for (sum, &c) in sums.iter_mut().zip(&counts) {
        sum.iter_mut().for_each(|v| *v /= c as f64);
    }
    sums
}

/// k-means over all pulses from the given starting centroids.
pub fn kmeans_symbolize(
    id: SubjectDay,
    pulses: &[&[f64]],
    init: Vec<Vec<f64>>,
    cfg: &SymbolizeConfig,
) -> Result<(SymbolVector, KMeansOutcome)> {
    let len = pulses.first().map_or(0, |p| p.len());
    let radius = cfg.band.radius(len);
    let out = kmeans(pulses, init, cfg.metric, radius, cfg.max_iter)?;
    let v = SymbolVector::from_counts(id, out.centroids.clone(), &out.counts)?;
    Ok((v, out))
}

/// Seed for a subject-day's subsample.
pub fn subsample_seed(master: u64, id: &SubjectDay) -> u64 {
    crate::seed::derive(master, "subsample", &[crate::seed::tag(&id.subject), id.day as u64])
}

/// Symbolize one subject-day's normalized pulses.
pub fn symbolize_day(set: &SegmentSet, cfg: &SymbolizeConfig, master_seed: u64) -> Result<(SymbolVector, SymbolizeReport)> {
    if set.segments.is_empty() {
        return Err(Error::EmptyInput("subject-day has no pulses to symbolize"));
    }
    let rows = set.rows();
    let len = set.width();
    let radius = cfg.band.radius(len);
    let idx = subsample_indices(rows.len(), cfg.subsample_size, subsample_seed(master_seed, &set.id))?;
    let sample: Vec<&[f64]> = idx.iter().map(|&i| rows[i]).collect();
    let dend = ward_cluster(&self_distances(&sample, radius)?)?;
    let cut = match cfg.n_symbols {
        Some(n) => cut_to_n(&dend, n)?,
        None => cut_dendrogram(&dend, cfg.cut_fraction),
    };
    let init = initial_centroids(&sample, &cut);
    let (v, out) = kmeans_symbolize(set.id.clone(), &rows, init, cfg)?;
    log::debug!(
        "{}: {} pulses, k={} after {} iterations",
        set.id,
        rows.len(),
        v.k(),
        out.iterations
    );
    let report = SymbolizeReport {
        pulses: rows.len(),
        subsample: sample.len(),
        k_from_cut: cut.k,
        band_radius: radius,
        iterations: out.iterations,
        converged: out.converged,
        reverted: out.reverted,
        objective: out.objective,
    };
    Ok((v, report))
}
