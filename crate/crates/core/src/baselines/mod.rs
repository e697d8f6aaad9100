//! Acoustic-feature baselines: windowed features clustered with k-means,
//! and their per-day means clustered with Ward's linkage.

mod features;

pub use features::{
    compute_maf, compute_vaf, correlation_pruning, feature_names, features_csv, statistics,
    FeatureVector, PruningReport, VafConfig, FEATURE_COUNT, PRUNING_THRESHOLD, STATISTICS,
};

use rand::seq::index;

use crate::distance::{DistanceMatrix, Matrix, MatrixKind};
use crate::error::{Error, Result};
use crate::eval::{cluster_subject_days, ClusterAssignment};
use crate::label::SubjectDay;
use crate::symbolize::{kmeans, AssignMetric};

/// Z-score every feature column across the given vectors; constant columns become 0.
pub fn standardize(vectors: &[FeatureVector]) -> Vec<Vec<f64>> {
    let d = vectors.first().map_or(0, |v| v.values.len());
    let n = vectors.len() as f64;
    let mut out: Vec<Vec<f64>> = vectors.iter().map(|v| v.values.clone()).collect();
    for j in 0..d {
        let mean = vectors.iter().map(|v| v.values[j]).sum::<f64>() / n;
        let var = vectors.iter().map(|v| (v.values[j] - mean).powi(2)).sum::<f64>() / n;
        let sd = var.sqrt();
        for row in &mut out {
            row[j] = if sd > 1e-12 * (1.0 + mean.abs()) { (row[j] - mean) / sd } else { 0.0 };
        }
    }
    out
}

/// Window-level k-means result and its day-level majority vote.
#[derive(Clone, Debug, PartialEq)]
pub struct VafClustering {
    pub window_clusters: Vec<usize>,
    pub days: ClusterAssignment,
}

/// Most frequent cluster per subject-day; ties go to the lower cluster index.
pub fn majority_by_day(ids: &[SubjectDay], clusters: &[usize], n: usize) -> Result<ClusterAssignment> {
    let mut days: Vec<SubjectDay> = Vec::new();
    let mut counts: Vec<Vec<usize>> = Vec::new();
    for (id, &c) in ids.iter().zip(clusters) {
        let pos = match days.iter().position(|d| d == id) {
            Some(p) => p,
            None => {
                days.push(id.clone());
                counts.push(vec![0; n]);
                days.len() - 1
            }
        };
        counts[pos][c] += 1;
    }
    let labels = counts
        .iter()
        .map(|row| {
            let best = *row.iter().max().unwrap();
            row.iter().position(|&c| c == best).unwrap()
        })
        .collect();
    ClusterAssignment::new(days, labels, n)
}

/// k-means with squared Euclidean distance over standardized window
/// features, initialised from `n` distinct windows chosen by `seed`.
pub fn cluster_vaf(vectors: &[FeatureVector], n: usize, seed: u64) -> Result<VafClustering> {
    if n == 0 || n > vectors.len() {
        return Err(Error::TooManyClusters {
            requested: n,
            available: vectors.len(),
        });
    }
    let data = standardize(vectors);
    let rows: Vec<&[f64]> = data.iter().map(Vec::as_slice).collect();
    let mut rng = crate::seed::rng(crate::seed::derive(seed, "vaf-kmeans", &[n as u64]));
    let mut picks = index::sample(&mut rng, rows.len(), n).into_vec();
    picks.sort_unstable();
    let init = picks.iter().map(|&i| data[i].clone()).collect();
    let out = kmeans(&rows, init, AssignMetric::SquaredEuclidean, 0, 100)?;
    let ids: Vec<SubjectDay> = vectors.iter().map(|v| v.id.clone()).collect();
    let days = majority_by_day(&ids, &out.assignment, n)?;
    Ok(VafClustering {
        window_clusters: out.assignment,
        days,
    })
}

/// Euclidean distances between standardized day-mean vectors.
pub fn maf_distances(vectors: &[FeatureVector]) -> Result<DistanceMatrix> {
    let data = standardize(vectors);
    let q = data.len();
    let mut m = Matrix::zeros(q, q);
    for i in 0..q {
        for j in i + 1..q {
            let d = data[i]
                .iter()
                .zip(&data[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            m.set(i, j, d);
            m.set(j, i, d);
        }
    }
    DistanceMatrix::new(vectors.iter().map(|v| v.id.clone()).collect(), m, MatrixKind::Raw)
}

/// Ward clustering of day-mean vectors, cut to `n` clusters.
pub fn cluster_maf(vectors: &[FeatureVector], n: usize) -> Result<ClusterAssignment> {
    cluster_subject_days(&maf_distances(vectors)?, n)
}
