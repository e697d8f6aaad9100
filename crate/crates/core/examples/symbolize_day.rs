//! Symbolize one subject-day: Ward on a subsample, then k-means on every pulse.

use symbolic_mismatch::ingest::{NormalizationMode, RawRecording};
use symbolic_mismatch::segment::{segment_recording, SegmentationConfig};
use symbolic_mismatch::symbolize::{symbolize_day, SymbolizeConfig};
use symbolic_mismatch::synth::{synthesize_day, SynthSpec};

fn main() {
    let spec = SynthSpec::separated(1, 5);
    let (id, class) = spec.subject_days().into_iter().next().unwrap();
    let (samples, truth) = synthesize_day(&spec, &id, class).unwrap();
    let rec = RawRecording::new(samples, spec.sample_rate_hz as f64, &id.subject, id.day, id.label).unwrap();
    let seg = segment_recording(&rec, None, NormalizationMode::ZScore, &SegmentationConfig::default()).unwrap();

    let (v, report) = symbolize_day(&seg.set, &SymbolizeConfig::default(), 5).unwrap();
    println!(
        "{} pulses, subsample {}, cut gave k = {}, k-means {} iterations (converged {})",
        report.pulses, report.subsample, report.k_from_cut, report.iterations, report.converged
    );
    for (i, s) in v.symbols.iter().enumerate() {
        println!("  symbol {i}: frequency {:.3}", s.frequency);
    }
    println!("template use in the generator: {:?} (weights {:?})", truth.template_counts, class.weights);
}
