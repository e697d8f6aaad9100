use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distance::{build_envelope, Envelope};
use crate::error::{Error, Result};

/// Distance used to assign pulses to centroids.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssignMetric {
    #[default]
    LbKeogh,
    Euclidean,
    /// Plain Lloyd objective; used by the feature baselines.
    SquaredEuclidean,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KMeansOutcome {
    pub centroids: Vec<Vec<f64>>,
    pub assignment: Vec<usize>,
    pub counts: Vec<usize>,
    /// Sum of point-to-centroid distances after each assignment step.
    pub objective: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// True when an update would have raised the objective and was rolled back.
    pub reverted: bool,
}

struct Assigner<'a> {
    points: &'a [&'a [f64]],
    envelopes: Option<Vec<Envelope>>,
    metric: AssignMetric,
    radius: usize,
}

impl<'a> Assigner<'a> {
    fn new(points: &'a [&'a [f64]], metric: AssignMetric, radius: usize) -> Self {
        let envelopes = match metric {
            AssignMetric::LbKeogh => Some(points.par_iter().map(|p| build_envelope(p, radius)).collect()),
            AssignMetric::Euclidean | AssignMetric::SquaredEuclidean => None,
        };
        Assigner {
            points,
            envelopes,
            metric,
            radius,
        }
    }

    /// Nearest centroid per point (lowest index on ties) and the distance to it.
    fn assign(&self, centroids: &[Vec<f64>]) -> (Vec<usize>, Vec<f64>) {
        let cenv: Vec<Envelope> = match self.metric {
            AssignMetric::LbKeogh => centroids.iter().map(|c| build_envelope(c, self.radius)).collect(),
            AssignMetric::Euclidean | AssignMetric::SquaredEuclidean => Vec::new(),
        };
        (0..self.points.len())
            .into_par_iter()
            .map(|p| {
                let x = self.points[p];
                let mut best = (0usize, f64::INFINITY);
                for (c, centroid) in centroids.iter().enumerate() {
                    let d = match &self.envelopes {
                        Some(envs) => crate::distance::symmetric_lb_keogh(x, &envs[p], centroid, &cenv[c])
                            .expect("lengths checked on entry"),
                        None if self.metric == AssignMetric::SquaredEuclidean => squared_euclidean(x, centroid),
                        None => squared_euclidean(x, centroid).sqrt(),
                    };
                    if d < best.1 {
                        best = (c, d);
                    }
                }
                best
            })
            .unzip()
    }
}

fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>()
}

/// Sequential, index-ordered sum so results are bit-stable.
fn ordered_sum(xs: &[f64]) -> f64 {
    xs.iter().sum()
}

fn member_counts(assignment: &[usize], k: usize) -> Vec<usize> {
    let mut counts = vec![0usize; k];
    for &a in assignment {
        counts[a] += 1;
    }
    counts
}

/// Pointwise means of members; empty clusters take the pulse farthest from
/// its own centroid (each such pulse used at most once).
fn update(points: &[&[f64]], assignment: &[usize], dists: &[f64], k: usize) -> Vec<Vec<f64>> {
    let len = points[0].len();
    let mut sums = vec![vec![0.0; len]; k];
    let counts = member_counts(assignment, k);
    for (p, &a) in points.iter().zip(assignment) {
        for (s, v) in sums[a].iter_mut().zip(p.iter()) {
            *s += v;
        }
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| dists[b].total_cmp(&dists[a]).then(a.cmp(&b)));
    let mut far = order.into_iter();
    for c in 0..k {
        if counts[c] == 0 {
            let p = far.next().expect("k never exceeds the number of points");
            sums[c] = points[p].to_vec();
        } else {
            let n = counts[c] as f64;
            sums[c].iter_mut().for_each(|s| *s /= n);
        }
    }
    sums
}

/// Lloyd iterations from the given centroids until no assignment changes or
/// `max_iter` updates have run. An update that would increase the objective
/// is discarded and iteration stops, so `objective` never increases.
pub fn kmeans(
    points: &[&[f64]],
    init: Vec<Vec<f64>>,
    metric: AssignMetric,
    band_radius: usize,
    max_iter: usize,
) -> Result<KMeansOutcome> {
    let k = init.len();
    if k == 0 {
        return Err(Error::InvalidParameter("k-means needs at least one centroid".into()));
    }
    if k > points.len() {
        return Err(Error::TooManyClusters {
            requested: k,
            available: points.len(),
        });
    }
    let len = points[0].len();
    for s in points.iter().map(|p| p.len()).chain(init.iter().map(Vec::len)) {
        if s != len {
            return Err(Error::LengthMismatch { expected: len, got: s });
        }
    }

    let assigner = Assigner::new(points, metric, band_radius);
    let mut centroids = init;
    let (mut assignment, mut dists) = assigner.assign(&centroids);
    let mut objective = vec![ordered_sum(&dists)];
    let mut iterations = 0;
    let mut converged = false;
    let mut reverted = false;
    while iterations < max_iter {
        let next = update(points, &assignment, &dists, k);
        let (next_assignment, next_dists) = assigner.assign(&next);
        let next_obj = ordered_sum(&next_dists);
        if next_obj > *objective.last().unwrap() {
            reverted = true;
            break;
        }
        iterations += 1;
        let stable = next_assignment == assignment;
        centroids = next;
        assignment = next_assignment;
        dists = next_dists;
        objective.push(next_obj);
        if stable {
            converged = true;
            break;
        }
    }
    let counts = member_counts(&assignment, k);
    Ok(KMeansOutcome {
        centroids,
        assignment,
        counts,
        objective,
        iterations,
        converged,
        reverted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn refs(v: &[Vec<f64>]) -> Vec<&[f64]> {
        v.iter().map(Vec::as_slice).collect()
    }

    #[test]
    fn single_cluster_is_the_mean() {
        let pts = vec![vec![0.0, 1.0, 2.0], vec![2.0, 3.0, 4.0], vec![1.0, -1.0, 0.0]];
        let out = kmeans(&refs(&pts), vec![vec![9.0; 3]], AssignMetric::LbKeogh, 1, 100).unwrap();
        assert_eq!(out.centroids, vec![vec![1.0, 1.0, 2.0]]);
        assert_eq!(out.counts, vec![3]);
        assert!(out.converged);
    }

    #[test]
    fn two_exact_populations() {
        let t1: Vec<f64> = (0..32).map(|i| (i as f64 / 5.0).sin()).collect();
        let t2: Vec<f64> = (0..32).map(|i| if i < 16 { 1.0 } else { -1.0 }).collect();
        let mut pts = Vec::new();
        for _ in 0..500 {
            pts.push(t1.clone());
            pts.push(t2.clone());
        }
        // Start from perturbed templates.
        let init = vec![t1.iter().map(|v| v + 0.3).collect(), t2.iter().map(|v| v * 0.5).collect()];
        for metric in [AssignMetric::LbKeogh, AssignMetric::Euclidean] {
            let out = kmeans(&refs(&pts), init.clone(), metric, 4, 100).unwrap();
            for (c, t) in out.centroids.iter().zip([&t1, &t2]) {
                assert!(c.iter().zip(t.iter()).all(|(a, b)| (a - b).abs() < 1e-12));
            }
            assert_eq!(out.counts, vec![500, 500]);
            assert!(out.converged && out.iterations <= 2, "{} iterations", out.iterations);
        }
    }

    #[test]
    fn empty_cluster_reseeded() {
        let pts = vec![vec![0.0, 0.0], vec![0.1, 0.0], vec![5.0, 5.0]];
        let init = vec![vec![0.0, 0.0], vec![100.0, 100.0], vec![0.05, 0.0]];
        let out = kmeans(&refs(&pts), init, AssignMetric::Euclidean, 0, 100).unwrap();
        assert!(out.counts.iter().all(|&c| c > 0), "{:?}", out.counts);
        assert_eq!(out.counts.iter().sum::<usize>(), 3);
    }

    #[test]
    fn errors() {
        let pts = vec![vec![0.0, 1.0]];
        assert!(matches!(
            kmeans(&refs(&pts), vec![vec![0.0, 1.0]; 2], AssignMetric::LbKeogh, 0, 10),
            Err(Error::TooManyClusters { requested: 2, available: 1 })
        ));
        assert!(matches!(
            kmeans(&refs(&pts), vec![vec![0.0]], AssignMetric::LbKeogh, 0, 10),
            Err(Error::LengthMismatch { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn objective_never_increases(seed in any::<u64>(), k in 1usize..6, which in 0usize..3) {
            let mut rng = crate::seed::rng(seed);
            let pts: Vec<Vec<f64>> = (0..60)
                .map(|_| (0..12).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let init = pts[..k].to_vec();
            let metric = [AssignMetric::LbKeogh, AssignMetric::Euclidean, AssignMetric::SquaredEuclidean][which];
            let out = kmeans(&refs(&pts), init, metric, 2, 100).unwrap();
            for w in out.objective.windows(2) {
                prop_assert!(w[1] <= w[0]);
            }
            prop_assert_eq!(out.counts.iter().sum::<usize>(), 60);
            prop_assert_eq!(out.objective.len(), out.iterations + 1);
        }
    }
}
