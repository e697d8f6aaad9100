use serde::{Deserialize, Serialize};

use crate::distance::Matrix;
use crate::error::{Error, Result};

/// One agglomeration step. Leaves are nodes `0..n`; merge `m` creates node `n + m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub leaf_count: usize,
    pub merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn max_height(&self) -> f64 {
        self.merges.iter().map(|m| m.height).fold(0.0, f64::max)
    }
}

/// Condensed upper triangle of a square matrix.
struct Condensed {
    n: usize,
    data: Vec<f64>,
}

impl Condensed {
    fn from_matrix(m: &Matrix) -> Self {
        let n = m.rows();
        let mut data = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            data.extend_from_slice(&m.row(i)[i + 1..]);
        }
        Condensed { n, data }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        i * self.n - i * (i + 1) / 2 + (j - i - 1)
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }
}

/// Agglomerative clustering with the Lance-Williams Ward update applied to
/// the given dissimilarities:
///
/// `d(k, i+j) = ((n_i+n_k) d(k,i) + (n_j+n_k) d(k,j) - n_k d(i,j)) / (n_i+n_j+n_k)`
///
/// A merged cluster keeps the slot of its smaller-indexed half, so each slot
/// is named by the lowest leaf it contains. Among equally close pairs the
/// lexicographically lowest slot pair merges first.
///
/// Each active slot caches its nearest higher-indexed neighbour; only rows
/// whose cached neighbour was touched by a merge are rescanned.
pub fn ward_cluster(d: &Matrix) -> Result<Dendrogram> {
    d.check_dissimilarity()?;
    let n = d.rows();
    if n == 0 {
        return Err(Error::EmptyInput("cannot cluster zero items"));
    }
    let mut dist = Condensed::from_matrix(d);
    let mut active = vec![true; n];
    let mut size = vec![1usize; n];
    let mut node: Vec<usize> = (0..n).collect();
    let mut nn = vec![usize::MAX; n];
    let mut nn_dist = vec![f64::INFINITY; n];

    let rescan = |k: usize, dist: &Condensed, active: &[bool], nn: &mut [usize], nn_dist: &mut [f64]| {
        let mut best = (usize::MAX, f64::INFINITY);
        for j in k + 1..n {
            if active[j] {
                let v = dist.get(k, j);
                if v < best.1 {
                    best = (j, v);
                }
            }
        }
        nn[k] = best.0;
        nn_dist[k] = best.1;
    };
    for k in 0..n {
        rescan(k, &dist, &active, &mut nn, &mut nn_dist);
    }

    let mut merges = Vec::with_capacity(n - 1);
    for step in 0..n - 1 {
        let mut i = usize::MAX;
        let mut h = f64::INFINITY;
        for k in 0..n {
            if active[k] && nn[k] != usize::MAX && nn_dist[k] < h {
                i = k;
                h = nn_dist[k];
            }
        }
        let j = nn[i];
        let (ni, nj) = (size[i] as f64, size[j] as f64);
        for k in 0..n {
            if !active[k] || k == i || k == j {
                continue;
            }
            let nk = size[k] as f64;
            let v = ((ni + nk) * dist.get(i, k) + (nj + nk) * dist.get(j, k) - nk * h) / (ni + nj + nk);
            dist.set(i, k, v);
        }
        active[j] = false;
        size[i] += size[j];
        let (a, b) = (node[i].min(node[j]), node[i].max(node[j]));
        merges.push(Merge {
            left: a,
            right: b,
            height: h,
            size: size[i],
        });
        node[i] = n + step;

        for k in 0..j {
            if !active[k] {
                continue;
            }
            if k < i {
                if nn[k] == i || nn[k] == j {
                    rescan(k, &dist, &active, &mut nn, &mut nn_dist);
                } else {
                    let v = dist.get(k, i);
                    if v < nn_dist[k] || (v == nn_dist[k] && i < nn[k]) {
                        nn[k] = i;
                        nn_dist[k] = v;
                    }
                }
            } else if k == i || nn[k] == j {
                rescan(k, &dist, &active, &mut nn, &mut nn_dist);
            }
        }
    }
    Ok(Dendrogram { leaf_count: n, merges })
}

/// Flat clustering of the leaves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cut {
    pub k: usize,
    /// Cluster of each leaf, numbered by first appearance in leaf order.
    pub labels: Vec<usize>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn labels_from(dend: &Dendrogram, keep: impl Fn(usize, &Merge) -> bool) -> Cut {
    let n = dend.leaf_count;
    let mut parent: Vec<usize> = (0..n + dend.merges.len()).collect();
    for (m, merge) in dend.merges.iter().enumerate() {
        if keep(m, merge) {
            let node = n + m;
            let a = find(&mut parent, merge.left);
            let b = find(&mut parent, merge.right);
            parent[a] = node;
            parent[b] = node;
        }
    }
    let mut roots: Vec<usize> = Vec::new();
    let mut labels = Vec::with_capacity(n);
    for leaf in 0..n {
        let r = find(&mut parent, leaf);
        let label = match roots.iter().position(|&x| x == r) {
            Some(p) => p,
            None => {
                roots.push(r);
                roots.len() - 1
            }
        };
        labels.push(label);
    }
    Cut {
        k: roots.len(),
        labels,
    }
}

/// Undo every merge higher than `fraction` of the tallest merge.
pub fn cut_dendrogram(dend: &Dendrogram, fraction: f64) -> Cut {
    let threshold = fraction * dend.max_height();
    labels_from(dend, |_, m| m.height <= threshold)
}

/// Keep the first `leaf_count - n` merges, leaving exactly `n` clusters.
pub fn cut_to_n(dend: &Dendrogram, n: usize) -> Result<Cut> {
    if n == 0 || n > dend.leaf_count {
        return Err(Error::TooManyClusters {
            requested: n,
            available: dend.leaf_count,
        });
    }
    let applied = dend.leaf_count - n;
    Ok(labels_from(dend, |m, _| m < applied))
}


#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line_fixture() -> Matrix {
        let x = [0.0, 1.0, 2.5, 10.0, 11.0, 12.5];
        let rows: Vec<Vec<f64>> = x.iter().map(|a| x.iter().map(|b| f64::abs(a - b)).collect()).collect();
        Matrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn two_items() {
        let d = Matrix::from_rows(&[vec![0.0, 3.5], vec![3.5, 0.0]]).unwrap();
        let dend = ward_cluster(&d).unwrap();
        assert_eq!(dend.merges, vec![Merge { left: 0, right: 1, height: 3.5, size: 2 }]);
    }

    #[test]
    fn two_groups_on_a_line() {
        // Heights from an independent linkage run (sqrt inputs, squared heights).
        let dend = ward_cluster(&line_fixture()).unwrap();
        let want = [
            (0, 1, 1.0, 2),
            (3, 4, 1.0, 2),
            (2, 6, 2.3333333333333335, 3),
            (5, 7, 2.3333333333333335, 3),
            (8, 9, 26.666666666666664, 6),
        ];
        assert_eq!(dend.merges.len(), want.len());
        for (m, &(l, r, h, s)) in dend.merges.iter().zip(&want) {
            assert_eq!((m.left, m.right, m.size), (l, r, s));
            assert!((m.height - h).abs() < 1e-12, "{} vs {h}", m.height);
        }
        let cut = cut_dendrogram(&dend, 0.3);
        assert_eq!(cut.k, 2);
        assert_eq!(cut.labels, vec![0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn equal_distances_recursion() {
        // By hand: (2*1 + 2*1 - 1)/3 = 1, then (3*1 + 2*1 - 1)/4 = 1.
        let mut d = Matrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    d.set(i, j, 1.0);
                }
            }
        }
        let dend = ward_cluster(&d).unwrap();
        let got: Vec<(usize, usize, f64)> = dend.merges.iter().map(|m| (m.left, m.right, m.height)).collect();
        assert_eq!(got, vec![(0, 1, 1.0), (2, 4, 1.0), (3, 5, 1.0)]);
    }

    #[test]
    fn rejects_bad_matrices() {
        let asym = Matrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap();
        assert!(ward_cluster(&asym).is_err());
        let neg = Matrix::from_rows(&[vec![0.0, -1.0], vec![-1.0, 0.0]]).unwrap();
        assert!(ward_cluster(&neg).is_err());
    }

    #[test]
    fn cuts() {
        let dend = ward_cluster(&line_fixture()).unwrap();
        assert_eq!(cut_dendrogram(&dend, 1.0).k, 1);
        assert_eq!(cut_to_n(&dend, 6).unwrap().labels, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(cut_to_n(&dend, 3).unwrap().labels, vec![0, 0, 0, 1, 1, 2]);
        assert!(cut_to_n(&dend, 7).is_err());
        assert!(cut_to_n(&dend, 0).is_err());
        let single = ward_cluster(&Matrix::zeros(1, 1)).unwrap();
        assert!(single.merges.is_empty());
        assert_eq!(cut_dendrogram(&single, 0.3), Cut { k: 1, labels: vec![0] });
    }

    fn random_dissimilarity() -> impl Strategy<Value = Matrix> {
        (2usize..14).prop_flat_map(|n| {
            proptest::collection::vec(0u32..40, n * (n - 1) / 2).prop_map(move |vals| {
                let mut m = Matrix::zeros(n, n);
                let mut it = vals.into_iter();
                for i in 0..n {
                    for j in i + 1..n {
                        // Small integer grid forces plenty of ties.
                        let v = it.next().unwrap() as f64 / 4.0;
                        m.set(i, j, v);
                        m.set(j, i, v);
                    }
                }
                m
            })
        })
    }

    fn leaves(dend: &Dendrogram, node: usize) -> Vec<usize> {
        let n = dend.leaf_count;
        if node < n {
            return vec![node];
        }
        let m = dend.merges[node - n];
        let mut out = leaves(dend, m.left);
        out.extend(leaves(dend, m.right));
        out.sort_unstable();
        out
    }

    proptest! {
        #[test]
        fn matches_naive_agglomeration(d in random_dissimilarity()) {
            let dend = ward_cluster(&d).unwrap();
            let naive = oracle::naive_ward(&d);
            prop_assert_eq!(dend.merges.len(), d.rows() - 1);
            for (m, (a, b, h)) in dend.merges.iter().zip(&naive) {
                let mut l = leaves(&dend, m.left);
                let mut r = leaves(&dend, m.right);
                if l[0] > r[0] {
                    std::mem::swap(&mut l, &mut r);
                }
                let (mut a, mut b) = (a.clone(), b.clone());
                a.sort_unstable();
                b.sort_unstable();
                prop_assert_eq!(&l, &a);
                prop_assert_eq!(&r, &b);
                prop_assert!((m.height - h).abs() <= 1e-12 * (1.0 + h));
                prop_assert_eq!(m.size, l.len() + r.len());
            }
            for w in dend.merges.windows(2) {
                prop_assert!(w[1].height >= w[0].height - 1e-12);
            }
        }

        #[test]
        fn coarser_fraction_fewer_clusters(d in random_dissimilarity(), f1 in 0.0f64..1.0, f2 in 0.0f64..1.0) {
            let dend = ward_cluster(&d).unwrap();
            let (lo, hi) = if f1 <= f2 { (f1, f2) } else { (f2, f1) };
            let (c_lo, c_hi) = (cut_dendrogram(&dend, lo), cut_dendrogram(&dend, hi));
            prop_assert!(c_lo.k >= c_hi.k);
            prop_assert_eq!(c_lo.labels.len(), d.rows());
            prop_assert!(c_lo.labels.iter().all(|&l| l < c_lo.k));
            for n in 1..=d.rows() {
                prop_assert_eq!(cut_to_n(&dend, n).unwrap().k, n);
            }
        }
    }
}
