//! End to end: synthesize a cohort, run every stage, print the headline report.

use symbolic_mismatch::pipeline::{run_pipeline, ComparisonChoice, PipelineConfig, RunOptions};
use symbolic_mismatch::synth::{generate_cohort, SynthSpec, MANIFEST_NAME};

fn main() {
    let root = std::env::temp_dir().join("symmis-pipeline-example");
    let mut spec = SynthSpec::separated(3, 2);
    spec.days_per_subject = 2;
    spec.day_seconds = 30.0;
    generate_cohort(&spec, &root.join("cohort")).unwrap();

    let mut cfg = PipelineConfig::default();
    cfg.seed = 2;
    cfg.evaluation.n = 2;
    cfg.evaluation.trials = 500;
    cfg.evaluation.sweep = Some([2, 6]);
    cfg.evaluation.comparisons = vec![ComparisonChoice::PretxCon];
    let opts = RunOptions {
        workers: None,
        cache_dir: Some(root.join("cache")),
    };
    let report = run_pipeline(&cfg, &root.join("cohort").join(MANIFEST_NAME), &root.join("out"), &opts).unwrap();
    for r in &report.comparisons {
        println!("{} n = {}: concentration {} p {}", r.comparison, r.n, r.total_class_conc, r.p_display.as_deref().unwrap_or("-"));
    }
    if let Some(s) = &report.sweep {
        for row in &s.rows {
            println!("  n = {:2}: {:.3}", row.n, row.points[0].total_class_conc);
        }
    }
    println!("reports in {}", root.join("out").display());
}
