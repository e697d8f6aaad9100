//! Concentration of a clustering, and its significance against random distances.

use symbolic_mismatch::distance::{DistanceMatrix, Matrix, MatrixKind};
use symbolic_mismatch::eval::{
    class_concentration, rrdm_significance, subject_concentration, total_concentration, ClusterAssignment,
    ConcentrationMetric,
};
use symbolic_mismatch::{ClassLabel, SubjectDay};

fn main() {
    // One cluster of five days: one control day, four patient days from two subjects.
    let days = vec![
        SubjectDay::new("v1", 1, ClassLabel::Control),
        SubjectDay::new("v2", 1, ClassLabel::PreTx),
        SubjectDay::new("v2", 3, ClassLabel::PreTx),
        SubjectDay::new("v3", 1, ClassLabel::PreTx),
        SubjectDay::new("v3", 5, ClassLabel::PreTx),
    ];
    let refs: Vec<&SubjectDay> = days.iter().collect();
    println!("class {} subject {}", class_concentration(&refs).unwrap(), subject_concentration(&refs).unwrap());

    let a = ClusterAssignment::new(days.clone(), vec![0, 1, 1, 1, 1], 2).unwrap();
    println!("split in two: total {}", total_concentration(&a, ConcentrationMetric::Class).unwrap());

    // Two well separated groups of eight days each.
    let ids: Vec<SubjectDay> = (0..16)
        .map(|i| SubjectDay::new(format!("S{}", i / 2), i % 2, if i < 8 { ClassLabel::Control } else { ClassLabel::PreTx }))
        .collect();
    let xs: Vec<f64> = (0..16).map(|i| if i < 8 { i as f64 * 0.1 } else { 5.0 + i as f64 * 0.1 }).collect();
    let rows: Vec<Vec<f64>> = xs.iter().map(|a| xs.iter().map(|b| (a - b).abs()).collect()).collect();
    let dm = DistanceMatrix::new(ids, Matrix::from_rows(&rows).unwrap(), MatrixKind::Raw).unwrap();
    let r = rrdm_significance(&dm, 2, 1000, 1).unwrap();
    println!("observed {} p {} (threshold for p < 0.01: {:?})", r.observed, r.p_display(), r.threshold(0.01));
}
