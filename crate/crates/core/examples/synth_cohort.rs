//! Write a small synthetic cohort to a temporary directory and list it.

use symbolic_mismatch::synth::{generate_cohort, SynthSpec, GROUND_TRUTH_NAME, MANIFEST_NAME};

fn main() {
    let dir = std::env::temp_dir().join("symmis-synth-example");
    let mut spec = SynthSpec::treatment(2, 1);
    spec.days_per_subject = 2;
    spec.classes[2].first_day = 2;
    spec.day_seconds = 10.0;
    let (manifest, truth) = generate_cohort(&spec, &dir).unwrap();
    for (entry, day) in manifest.entries.iter().zip(&truth.days) {
        println!(
            "{:<12} {:>4} day {} {:<8} {:>2} runs {:>5} pulses",
            entry.path.display(),
            entry.subject,
            entry.day,
            entry.label,
            day.runs.len(),
            day.total_pulses()
        );
    }
    println!("{} and {} in {}", MANIFEST_NAME, GROUND_TRUTH_NAME, dir.display());
}
