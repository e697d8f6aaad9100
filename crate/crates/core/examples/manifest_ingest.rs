//! Parse a cohort manifest, load a CSV recording and map it to dB levels.

use symbolic_mismatch::ingest::{load_recording, rms, write_csv, Calibration, CohortManifest};

fn main() {
    let dir = std::env::temp_dir().join("symmis-ingest-example");
    std::fs::create_dir_all(&dir).unwrap();
    let tone: Vec<f64> = (0..8000).map(|i| 0.1 * (i as f64 * 0.0785).sin()).collect();
    write_csv(&dir.join("S01_d0.csv"), &tone).unwrap();

    let manifest = CohortManifest::parse(
        r#"
[[recording]]
path = "S01_d0.csv"
subject = "S01"
day = 0
label = "PreTx"
sample_rate_hz = 8000.0
calibration = [[0.01, 60.0], [0.1, 80.0]]
"#,
        &dir,
    )
    .unwrap();
    let entry = &manifest.entries[0];
    let rec = load_recording(&manifest.resolve(entry), entry).unwrap();
    let cal = Calibration::fit(&entry.calibration_pairs()).unwrap();
    let level = rms(&rec.samples);
    println!("{}: {} samples at {} Hz", rec.id(), rec.len(), rec.sample_rate_hz);
    println!("rms {:.4} -> {:.1} dB calibrated, {:.1} dB uncalibrated", level, cal.level_db(level), Calibration::uncalibrated().level_db(level));
}
