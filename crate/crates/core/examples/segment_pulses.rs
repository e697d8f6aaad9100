//! Segment a synthetic pulse train and compare recovered pulses with the truth.

use symbolic_mismatch::ingest::{NormalizationMode, RawRecording};
use symbolic_mismatch::segment::{segment_recording, SegmentationConfig};
use symbolic_mismatch::synth::{synthesize_day, SynthSpec};

fn main() {
    let mut spec = SynthSpec::separated(1, 11);
    spec.day_seconds = 20.0;
    let (id, class) = spec.subject_days().into_iter().next().unwrap();
    let (samples, truth) = synthesize_day(&spec, &id, class).unwrap();
    let rec = RawRecording::new(samples, spec.sample_rate_hz as f64, &id.subject, id.day, id.label).unwrap();
    let seg = segment_recording(&rec, None, NormalizationMode::ZScore, &SegmentationConfig::default()).unwrap();

    println!("{}: {:.1} s, {} voiced regions", id, rec.duration_s(), seg.regions.len());
    for (region, run) in seg.regions.iter().zip(&truth.runs).take(5) {
        let pitch = region.pitch.map(|p| p.frequency_hz(rec.sample_rate_hz)).unwrap_or(f64::NAN);
        println!(
            "  region at {:>7}: pitch {:6.1} Hz, {:3} pulses (truth {} at {:.1} Hz)",
            region.start_sample, pitch, region.pulses, run.pulses, run.pitch_hz
        );
    }
    println!("total pulses {} (truth {}), length {}", seg.set.segments.len(), truth.total_pulses(), seg.set.width());
}
