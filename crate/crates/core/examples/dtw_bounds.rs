//! Banded DTW against the symmetric LB_Keogh bound on random walks.

use rand::Rng;
use symbolic_mismatch::distance::{dtw, lb_keogh_distance, Band, BandRule};

fn walk(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    let mut x = 0.0;
    (0..len)
        .map(|_| {
            x += rng.gen_range(-1.0..1.0);
            x
        })
        .collect()
}

fn main() {
    let mut rng = symbolic_mismatch::seed::rng(7);
    println!("{:>5} {:>7} {:>10} {:>10} {:>6}", "len", "radius", "lb_keogh", "dtw", "ratio");
    for len in [16, 64, 256] {
        let r = BandRule::default().radius(len);
        let a = walk(&mut rng, len);
        let b = walk(&mut rng, len);
        let lb = lb_keogh_distance(&a, &b, r).unwrap();
        let d = dtw(&a, &b, Band::Radius(r)).unwrap();
        println!("{len:>5} {r:>7} {lb:>10.4} {d:>10.4} {:>6.3}", lb / d);
    }
}
