//! Symbolic mismatch between hand-made symbol vectors.

use symbolic_mismatch::distance::BandRule;
use symbolic_mismatch::mismatch::{mismatch_matrix, symbolic_mismatch};
use symbolic_mismatch::symbolize::{Symbol, SymbolVector};
use symbolic_mismatch::{ClassLabel, SubjectDay};

fn bump(center: f64, len: usize) -> Vec<f64> {
    (0..len)
        .map(|i| (-((i as f64 / len as f64 - center) / 0.08).powi(2)).exp())
        .collect()
}

fn vector(subject: &str, label: ClassLabel, parts: &[(f64, f64)]) -> SymbolVector {
    let symbols = parts
        .iter()
        .map(|&(c, f)| Symbol {
            centroid: bump(c, 40),
            frequency: f,
        })
        .collect();
    SymbolVector::new(SubjectDay::new(subject, 0, label), symbols).unwrap()
}

fn main() {
    let vs = vec![
        vector("A", ClassLabel::Control, &[(0.3, 0.7), (0.6, 0.3)]),
        vector("B", ClassLabel::Control, &[(0.3, 0.6), (0.6, 0.4)]),
        vector("C", ClassLabel::PreTx, &[(0.8, 1.0)]),
    ];
    let band = BandRule::default();
    println!("W(A, B) = {:.4}", symbolic_mismatch(&vs[0], &vs[1], band).unwrap());
    println!("W(A, A) = {:.4}  (nonzero: a day mixes distinct symbols)", symbolic_mismatch(&vs[0], &vs[0], band).unwrap());
    print!("{}", mismatch_matrix(&vs, band).unwrap().to_csv());
}
