use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::cache::{StageCache, CACHE_VERSION};
use super::config::PipelineConfig;
use super::stages::{hash_inputs, mismatch_stage, segment_stage, symbolize_stage, InputFile, SymbolizedDay};
use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::eval::{
    assignment_csv, cluster_subject_days, concentration_csv, concentration_report, ecdf_csv, heatmap_csv,
    intra_subject_compare, sensitivity_sweep, sweep_csv, write_json, write_text, Comparison, ConcentrationReport,
    IntraSubjectRow, SweepResult,
};
use crate::ingest::{CohortManifest, NormalizationMode};
use crate::label::ClassLabel;
use crate::seed::{derive, tag};
use crate::symbolize::write_symbol_vectors;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Files `run_pipeline` always writes, relative to the output directory.
pub const REPORT_NAME: &str = "report.json";
pub const RUN_MANIFEST_NAME: &str = "run_manifest.json";

/// Execution settings that must not change any output byte.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses all cores.
    pub workers: Option<usize>,
    /// Stage cache directory; `None` disables caching.
    pub cache_dir: Option<PathBuf>,
}

pub fn thread_pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    if workers == Some(0) {
        return Err(Error::InvalidParameter("--workers must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))
}

/// File-name stem of a comparison.
pub fn comparison_slug(c: Comparison) -> &'static str {
    match c {
        Comparison::PreTxVsControl => "pretx_con",
        Comparison::PostTxVsControl => "posttx_con",
        Comparison::PreTxVsPostTx => "pretx_posttx",
    }
}

/// Seed of the headline report for one comparison.
pub fn report_seed(seed: u64, c: Comparison) -> u64 {
    derive(seed, "report", &[tag(c.name())])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    pub seed: u64,
    pub normalization: String,
    pub comparisons: Vec<ConcentrationReport>,
    pub sweep: Option<SweepResult>,
    pub intra_normalization: Option<String>,
    pub intra_subject: Vec<IntraSubjectRow>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputSummary {
    pub path: String,
    pub subject: String,
    pub day: u32,
    pub label: ClassLabel,
    pub sha256: String,
    pub pulses: usize,
    pub symbols: usize,
}

/// Everything needed to reproduce a run: config echo, versions, seeds, inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub cache_version: u32,
    pub seed: u64,
    pub seed_derivation: String,
    pub config: PipelineConfig,
    pub inputs: Vec<InputSummary>,
    pub outputs: Vec<String>,
}

const SEED_DERIVATION: &str = "every random draw is seeded by derive(seed, stage, parts): \
subsample[subject, day], rrdm[trial] under report[comparison], sweep[comparison, n], intra[subject]";

/// Segment, symbolize and compare every recording under one normalization.
pub fn symbolize_cohort(
    cfg: &PipelineConfig,
    manifest: &CohortManifest,
    inputs: &[InputFile],
    mode: NormalizationMode,
    cache: Option<&StageCache>,
) -> Result<(Vec<SymbolizedDay>, DistanceMatrix)> {
    let segs = segment_stage(manifest, inputs, mode, &cfg.segmentation, cache)?;
    let days = symbolize_stage(&segs, &cfg.symbolization, cfg.seed, cache)?;
    let dm = mismatch_stage(&days, cfg.mismatch.band, cache)?.with_note("normalization", mode.as_str());
    Ok((days, dm))
}

fn has_both(dm: &DistanceMatrix, c: Comparison) -> bool {
    c.labels().iter().all(|l| dm.ids.iter().any(|id| id.label == *l))
}

/// Full pipeline from a manifest to report files in `out_dir`.
pub fn run_pipeline(cfg: &PipelineConfig, manifest_path: &Path, out_dir: &Path, opts: &RunOptions) -> Result<RunReport> {
    cfg.validate()?;
    let manifest = CohortManifest::load(manifest_path)?;
    if manifest.entries.len() < 2 {
        return Err(Error::EmptyInput("manifest needs at least two recordings"));
    }
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let cache = opts.cache_dir.as_ref().map(StageCache::new);
    let pool = thread_pool(opts.workers)?;
    pool.install(|| run_inner(cfg, &manifest, out_dir, cache.as_ref()))
}

fn run_inner(cfg: &PipelineConfig, manifest: &CohortManifest, out: &Path, cache: Option<&StageCache>) -> Result<RunReport> {
    let mut warnings = Vec::new();
    let mut outputs = vec!["symbols.txt".to_string(), "mismatch.csv".to_string()];
    let inputs = hash_inputs(manifest)?;
    let inter = cfg.normalization.inter_subject();
    log::info!("symbolizing {} recordings ({})", inputs.len(), inter.as_str());
    let (days, dm) = symbolize_cohort(cfg, manifest, &inputs, inter, cache)?;
    let vectors: Vec<_> = days.iter().map(|d| d.vector.clone()).collect();
    write_symbol_vectors(&out.join("symbols.txt"), &vectors)?;
    dm.write_csv(&out.join("mismatch.csv"))?;

    let ev = &cfg.evaluation;
    let mut reports = Vec::new();
    let mut sets = Vec::new();
    for c in ev.comparisons.iter().filter_map(|c| c.comparison()) {
        if !has_both(&dm, c) {
            let [a, b] = c.labels();
            warnings.push(format!("{}: skipped, cohort lacks {a} or {b} days", c.name()));
            continue;
        }
        let sub = c.subset(&dm);
        let n = if ev.n > sub.len() {
            warnings.push(format!("{}: n = {} exceeds {} subject-days; using {}", c.name(), ev.n, sub.len(), sub.len()));
            sub.len()
        } else {
            ev.n
        };
        let (report, rrdm) = concentration_report(&sub, n, ev.trials, report_seed(cfg.seed, c), c.name())
            .map_err(|e| e.in_stage("evaluate", c.name()))?;
        let slug = comparison_slug(c);
        let assignment = cluster_subject_days(&sub, n)?;
        write_text(&out.join(format!("heatmap_{slug}.csv")), &heatmap_csv(&assignment))?;
        write_text(&out.join(format!("assignment_{slug}.csv")), &assignment_csv(&assignment))?;
        outputs.push(format!("heatmap_{slug}.csv"));
        outputs.push(format!("assignment_{slug}.csv"));
        if let Some(r) = &rrdm {
            write_text(&out.join(format!("ecdf_{slug}.csv")), &ecdf_csv(r))?;
            outputs.push(format!("ecdf_{slug}.csv"));
        }
        reports.push(report);
        sets.push((c, sub));
    }
    write_text(&out.join("concentration.csv"), &concentration_csv(&reports))?;
    outputs.push("concentration.csv".into());

    let sweep = match ev.sweep {
        Some([from, to]) if !sets.is_empty() => {
            let q = sets.iter().map(|(_, s)| s.len()).min().unwrap_or(0);
            let hi = to.min(q);
            if hi < to {
                warnings.push(format!("sweep: upper bound {to} clipped to {hi} subject-days"));
            }
            if from > hi {
                warnings.push(format!("sweep: empty range after clipping [{from}, {to}]"));
                None
            } else {
                let ns: Vec<usize> = (from..=hi).collect();
                let s = sensitivity_sweep(&sets, &ns, ev.trials, cfg.seed).map_err(|e| e.in_stage("sweep", "cohort"))?;
                write_text(&out.join("sweep.csv"), &sweep_csv(&s))?;
                outputs.push("sweep.csv".into());
                Some(s)
            }
        }
        _ => None,
    };

    let mut intra_normalization = None;
    let mut intra_subject = Vec::new();
    let wants_intra = ev.comparisons.iter().any(|c| c.comparison().is_none());
    let paired: BTreeSet<&str> = dm
        .ids
        .iter()
        .filter(|id| id.label == ClassLabel::PreTx)
        .filter(|id| dm.ids.iter().any(|o| o.subject == id.subject && o.label == ClassLabel::PostTx))
        .map(|id| id.subject.as_str())
        .collect();
    if wants_intra && paired.is_empty() {
        warnings.push("per-patient: skipped, no subject has both PreTx and PostTx days".into());
    } else if wants_intra {
        let intra = cfg.normalization.intra_subject();
        let intra_dm = if intra == inter {
            dm.clone()
        } else {
            log::info!("symbolizing again for per-patient comparison ({})", intra.as_str());
            let (_, m) = symbolize_cohort(cfg, manifest, &inputs, intra, cache)?;
            m.write_csv(&out.join(format!("mismatch_{}.csv", intra.as_str())))?;
            outputs.push(format!("mismatch_{}.csv", intra.as_str()));
            m
        };
        intra_subject = intra_subject_compare(&intra_dm, ev.intra_n, ev.trials, cfg.seed)
            .map_err(|e| e.in_stage("evaluate", "per-patient"))?;
        intra_normalization = Some(intra.as_str().to_string());
    }
    for w in &warnings {
        log::warn!("{w}");
    }

    let report = RunReport {
        version: VERSION.to_string(),
        seed: cfg.seed,
        normalization: inter.as_str().to_string(),
        comparisons: reports,
        sweep,
        intra_normalization,
        intra_subject,
        warnings,
    };
    write_json(&out.join(REPORT_NAME), &report)?;
    outputs.push(REPORT_NAME.into());

    let run_manifest = RunManifest {
        tool: "symmis".into(),
        version: VERSION.into(),
        cache_version: CACHE_VERSION,
        seed: cfg.seed,
        seed_derivation: SEED_DERIVATION.into(),
        config: cfg.clone(),
        inputs: inputs
            .iter()
            .zip(&days)
            .map(|(i, d)| InputSummary {
                path: i.entry.path.display().to_string(),
                subject: i.entry.subject.clone(),
                day: i.entry.day,
                label: i.entry.label,
                sha256: i.sha256.clone(),
                pulses: d.pulses,
                symbols: d.vector.k(),
            })
            .collect(),
        outputs,
    };
    write_json(&out.join(RUN_MANIFEST_NAME), &run_manifest)?;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineMethodReport {
    pub method: String,
    pub n: usize,
    pub total_class_conc: f64,
    pub total_subj_conc: f64,
    pub per_cluster: Vec<crate::eval::ClusterConcentration>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineReport {
    pub version: String,
    pub seed: u64,
    pub windows: usize,
    pub days: usize,
    pub methods: Vec<BaselineMethodReport>,
    pub pruning: crate::baselines::PruningReport,
    pub warnings: Vec<String>,
}

fn method_report(method: &str, a: &crate::eval::ClusterAssignment) -> Result<BaselineMethodReport> {
    use crate::eval::{cluster_concentrations, total_concentration, ConcentrationMetric};
    Ok(BaselineMethodReport {
        method: method.into(),
        n: a.n,
        total_class_conc: total_concentration(a, ConcentrationMetric::Class)?,
        total_subj_conc: total_concentration(a, ConcentrationMetric::Subject)?,
        per_cluster: cluster_concentrations(a)?,
    })
}

/// Acoustic-feature baselines: window features clustered by k-means with a
/// per-day majority vote, and day-mean features clustered by Ward.
pub fn run_baseline(cfg: &PipelineConfig, manifest_path: &Path, out_dir: &Path, opts: &RunOptions) -> Result<BaselineReport> {
    use crate::baselines::{cluster_maf, cluster_vaf, correlation_pruning, features_csv};
    cfg.validate()?;
    let manifest = CohortManifest::load(manifest_path)?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let pool = thread_pool(opts.workers)?;
    pool.install(|| {
        let (vaf, maf) = super::stages::feature_stage(&manifest, &cfg.baseline.vaf)?;
        write_text(&out_dir.join("features_vaf.csv"), &features_csv(&vaf))?;
        write_text(&out_dir.join("features_maf.csv"), &features_csv(&maf))?;
        let mut warnings = Vec::new();
        let want = cfg.baseline.n.unwrap_or(cfg.evaluation.n);
        let n = want.min(maf.len());
        if n < want {
            warnings.push(format!("n = {want} exceeds {} days; using {n}", maf.len()));
        }
        let vaf_days = cluster_vaf(&vaf, n, derive(cfg.seed, "baseline", &[]))
            .map_err(|e| e.in_stage("baseline", "VAF clustering"))?
            .days;
        let maf_days = cluster_maf(&maf, n).map_err(|e| e.in_stage("baseline", "MAF clustering"))?;
        write_text(&out_dir.join("assignment_vaf.csv"), &assignment_csv(&vaf_days))?;
        write_text(&out_dir.join("assignment_maf.csv"), &assignment_csv(&maf_days))?;
        let report = BaselineReport {
            version: VERSION.into(),
            seed: cfg.seed,
            windows: vaf.len(),
            days: maf.len(),
            methods: vec![method_report("vaf", &vaf_days)?, method_report("maf", &maf_days)?],
            pruning: correlation_pruning(&maf),
            warnings,
        };
        write_json(&out_dir.join("baseline.json"), &report)?;
        Ok(report)
    })
}
