//! Stage orchestration: manifest in, report files out, with
//! content-addressed caching of per-day intermediates.

mod cache;
mod config;
mod labels;
mod run;
mod stages;

pub use cache::{file_digest, stage_key, StageCache, CACHE_VERSION};
pub use config::{
    BaselineConfig, ComparisonChoice, EvaluationConfig, MismatchConfig, NormalizationChoice, PipelineConfig,
};
pub use labels::{labeled_matrix, parse_label_table, read_matrix};
pub use run::{
    comparison_slug, report_seed, run_baseline, run_pipeline, BaselineMethodReport, BaselineReport, symbolize_cohort, thread_pool, InputSummary, RunManifest,
    RunOptions, RunReport, REPORT_NAME, RUN_MANIFEST_NAME, VERSION,
};
pub use stages::{
    entry_calibration, feature_stage, hash_inputs, mismatch_stage, segment_stage, symbolize_stage, InputFile,
    SegmentedDay, SymbolizedDay,
};
