//! Symbolic mismatch: frequency-weighted sum of distances between every
//! pair of symbols from two subject-days.

use std::borrow::Cow;

use rayon::prelude::*;

use crate::distance::{build_envelope, symmetric_lb_keogh, BandRule, DistanceMatrix, Matrix, MatrixKind};
use crate::error::{Error, Result};
use crate::segment::resample_linear;
use crate::symbolize::SymbolVector;

fn at_length(xs: &[f64], len: usize) -> Cow<'_, [f64]> {
    if xs.len() == len {
        Cow::Borrowed(xs)
    } else {
        Cow::Owned(resample_linear(xs, len))
    }
}

/// `W = sum_a sum_b f_a f_b dist(s_a, s_b)` with `dist` the symmetrized
/// LB_Keogh bound. Centroids of different lengths are linearly resampled to
/// the longer of the two. `W(v, v)` is generally nonzero.
pub fn symbolic_mismatch(vi: &SymbolVector, vj: &SymbolVector, band: BandRule) -> Result<f64> {
    if vi.symbols.is_empty() || vj.symbols.is_empty() {
        return Err(Error::EmptyInput("symbolic mismatch needs nonempty symbol vectors"));
    }
    let len = vi.centroid_len().max(vj.centroid_len());
    let radius = band.radius(len);
    fn prep(v: &SymbolVector, len: usize, radius: usize) -> Vec<(f64, Cow<'_, [f64]>, crate::distance::Envelope)> {
        v.symbols
            .iter()
            .map(|s| {
                let c = at_length(&s.centroid, len);
                let env = build_envelope(&c, radius);
                (s.frequency, c, env)
            })
            .collect()
    }
    let (a, b) = (prep(vi, len, radius), prep(vj, len, radius));
    let mut w = 0.0;
    for (fa, sa, ea) in &a {
        for (fb, sb, eb) in &b {
            w += fa * fb * symmetric_lb_keogh(sa, ea, sb, eb)?;
        }
    }
    Ok(w)
}

/// Mismatch between every pair of vectors; zero diagonal by convention.
pub fn mismatch_matrix(vectors: &[SymbolVector], band: BandRule) -> Result<DistanceMatrix> {
    let n = vectors.len();
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "a mismatch matrix needs at least 2 subject-days, got {n}"
        )));
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let values = pairs
        .par_iter()
        .map(|&(i, j)| symbolic_mismatch(&vectors[i], &vectors[j], band))
        .collect::<Result<Vec<f64>>>()?;
    let mut m = Matrix::zeros(n, n);
    for (&(i, j), v) in pairs.iter().zip(values) {
        m.set(i, j, v);
        m.set(j, i, v);
    }
    let ids = vectors.iter().map(|v| v.id.clone()).collect();
    Ok(DistanceMatrix::new(ids, m, MatrixKind::Mismatch)?
        .with_note("distance", "symmetric_lb_keogh_max")
        .with_note("length_alignment", "linear_resample_to_longer"))
}
