//! Distances between length-normalized pulses.
//!
//! Exact banded DTW is kept as the reference; the pipeline uses the
//! symmetrized LB_Keogh bound, which is cheap enough for dense matrices.

mod dtw;
mod keogh;
mod matrix;
mod pairwise;

pub use dtw::{dtw, Band};
pub use keogh::{build_envelope, lb_keogh, lb_keogh_distance, symmetric_lb_keogh, Envelope};
pub use matrix::{DistanceMatrix, Matrix, MatrixKind};
pub use pairwise::{pairwise_distances, self_distances, BandRule, EnvelopedSet};

