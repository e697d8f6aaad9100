//! Acoustic-feature baselines on a small synthetic cohort.

use symbolic_mismatch::baselines::{cluster_maf, cluster_vaf, compute_maf, compute_vaf, feature_names, VafConfig};
use symbolic_mismatch::eval::{total_concentration, ConcentrationMetric};
use symbolic_mismatch::ingest::RawRecording;
use symbolic_mismatch::synth::{synthesize_day, SynthSpec};

fn main() {
    let mut spec = SynthSpec::separated(2, 9);
    spec.day_seconds = 30.0;
    let cfg = VafConfig {
        window_s: 10.0,
        ..VafConfig::default()
    };
    let mut windows = Vec::new();
    let mut days = Vec::new();
    for (id, class) in spec.subject_days() {
        let (xs, _) = synthesize_day(&spec, &id, class).unwrap();
        let rec = RawRecording::new(xs, spec.sample_rate_hz as f64, &id.subject, id.day, id.label).unwrap();
        let w = compute_vaf(&rec, None, &cfg).unwrap();
        days.push(compute_maf(&w).unwrap());
        windows.extend(w);
    }
    let names = feature_names();
    println!("{} features, {} windows, {} days", names.len(), windows.len(), days.len());
    println!("{} = {:.1} for {}", names[0], days[0].values[0], days[0].id);

    let vaf = cluster_vaf(&windows, 2, 9).unwrap();
    let maf = cluster_maf(&days, 2).unwrap();
    for (name, a) in [("VAF", &vaf.days), ("MAF", &maf)] {
        println!("{name}: class concentration {:.3}", total_concentration(a, ConcentrationMetric::Class).unwrap());
    }
}
