//! Sensitivity sweep over the cluster count on a toy treatment cohort.

use symbolic_mismatch::distance::{DistanceMatrix, Matrix, MatrixKind};
use symbolic_mismatch::eval::{sensitivity_sweep, sweep_csv, Comparison};
use symbolic_mismatch::{ClassLabel, SubjectDay};

fn main() {
    // Controls near 0, patients near 10 before treatment and near 1 after.
    let mut ids = Vec::new();
    let mut xs = Vec::new();
    for s in 0..4 {
        for d in 0..3 {
            ids.push(SubjectDay::new(format!("C{s}"), d, ClassLabel::Control));
            xs.push(0.1 * (s * 3 + d) as f64);
            ids.push(SubjectDay::new(format!("P{s}"), d, ClassLabel::PreTx));
            xs.push(10.0 + 0.1 * (s * 3 + d) as f64);
            ids.push(SubjectDay::new(format!("P{s}"), d + 3, ClassLabel::PostTx));
            xs.push(1.0 + 0.13 * (s * 3 + d) as f64);
        }
    }
    let rows: Vec<Vec<f64>> = xs.iter().map(|a| xs.iter().map(|b| (a - b).abs()).collect()).collect();
    let dm = DistanceMatrix::new(ids, Matrix::from_rows(&rows).unwrap(), MatrixKind::Raw).unwrap();
    let sets: Vec<_> = [Comparison::PreTxVsControl, Comparison::PostTxVsControl]
        .into_iter()
        .map(|c| (c, c.subset(&dm)))
        .collect();
    let ns: Vec<usize> = (2..=8).collect();
    let s = sensitivity_sweep(&sets, &ns, 200, 3).unwrap();
    print!("{}", sweep_csv(&s));
    println!("largest PreTx-PostTx gap at n = {:?}; smallest near-max n = {:?}", s.argmax_n, s.smallest_n_near_max);
}
