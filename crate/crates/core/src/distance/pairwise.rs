use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::keogh::{build_envelope, symmetric_lb_keogh_unchecked, Envelope};
use super::matrix::Matrix;
use crate::error::{Error, Result};

/// How the Sakoe-Chiba radius is chosen for a sequence length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandRule {
    /// `ceil(fraction * length)`.
    Fraction(f64),
    Fixed(usize),
}

impl Default for BandRule {
    fn default() -> Self {
        BandRule::Fraction(0.1)
    }
}

impl BandRule {
    pub fn radius(&self, len: usize) -> usize {
        match *self {
            BandRule::Fraction(f) => (f * len as f64).ceil() as usize,
            BandRule::Fixed(r) => r,
        }
    }
}

/// Sequences with their envelopes precomputed.
pub struct EnvelopedSet<'a> {
    pub series: Vec<&'a [f64]>,
    pub envelopes: Vec<Envelope>,
}

impl<'a> EnvelopedSet<'a> {
    pub fn new(series: Vec<&'a [f64]>, band_radius: usize) -> Result<Self> {
        common_length(&series)?;
        let envelopes = series
            .par_iter()
            .map(|s| build_envelope(s, band_radius))
            .collect();
        Ok(EnvelopedSet { series, envelopes })
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    #[inline]
    pub fn distance(&self, i: usize, other: &EnvelopedSet<'_>, j: usize) -> f64 {
        symmetric_lb_keogh_unchecked(self.series[i], &self.envelopes[i], other.series[j], &other.envelopes[j])
    }
}

pub(crate) fn common_length(series: &[&[f64]]) -> Result<usize> {
    let len = series.first().map_or(0, |s| s.len());
    for s in series {
        if s.len() != len {
            return Err(Error::LengthMismatch {
                expected: len,
                got: s.len(),
            });
        }
    }
    Ok(len)
}

/// Symmetrized LB_Keogh between every `a_i` and `b_j`.
///
/// Rows are computed in parallel; each entry depends only on its own pair,
/// so the result is independent of the thread schedule.
pub fn pairwise_distances(a: &[&[f64]], b: &[&[f64]], band_radius: usize) -> Result<Matrix> {
    let la = common_length(a)?;
    let lb = common_length(b)?;
    if !a.is_empty() && !b.is_empty() && la != lb {
        return Err(Error::LengthMismatch { expected: la, got: lb });
    }
    let ea = EnvelopedSet::new(a.to_vec(), band_radius)?;
    let eb = EnvelopedSet::new(b.to_vec(), band_radius)?;
    let data: Vec<f64> = (0..a.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let ea = &ea;
            let eb = &eb;
            (0..b.len()).map(move |j| ea.distance(i, eb, j))
        })
        .collect();
    Matrix::from_vec(a.len(), b.len(), data)
}

/// Pairwise distances within one set: symmetric, zero diagonal, upper
/// triangle computed once and mirrored.
pub fn self_distances(set: &[&[f64]], band_radius: usize) -> Result<Matrix> {
    let es = EnvelopedSet::new(set.to_vec(), band_radius)?;
    let n = set.len();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| (i + 1..n).map(|j| es.distance(i, &es, j)).collect())
        .collect();
    let mut m = Matrix::zeros(n, n);
    for (i, row) in upper.into_iter().enumerate() {
        for (k, v) in row.into_iter().enumerate() {
            let j = i + 1 + k;
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    Ok(m)
}
