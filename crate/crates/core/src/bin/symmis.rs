use std::fs;
use std::panic;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use symbolic_mismatch::distance::DistanceMatrix;
use symbolic_mismatch::eval::{
    assignment_csv, cluster_subject_days, concentration_csv, concentration_report, ecdf_csv, heatmap_csv,
    sensitivity_sweep, sweep_csv, write_json, write_text, Comparison,
};
use symbolic_mismatch::ingest::{load_recording, CohortManifest, ManifestEntry};
use symbolic_mismatch::pipeline::{
    hash_inputs, mismatch_stage, read_matrix, run_baseline, run_pipeline, segment_stage, symbolize_stage,
    thread_pool, PipelineConfig, RunOptions, SegmentedDay, SymbolizedDay,
};
use symbolic_mismatch::segment::{read_segment_dump, segment_recording, write_segment_csv, write_segment_dump, SegmentSet};
use symbolic_mismatch::symbolize::{read_symbol_vectors, write_symbol_vectors};
use symbolic_mismatch::synth::{generate_cohort, SynthFormat, SynthSpec, MANIFEST_NAME};
use symbolic_mismatch::{ClassLabel, Error, Result};

#[derive(Parser, Debug)]
#[command(name = "symmis", version, about = "Pulse-shape symbolization and symbolic mismatch clustering")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Pipeline config (TOML). Missing keys take defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Cohort manifest (TOML).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads (default: all cores). Never changes results.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Master seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Stage cache directory (default: <out>/cache).
    #[arg(long, global = true)]
    stage_cache: Option<PathBuf>,
    /// Disable the stage cache.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Log more (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic cohort with a manifest and ground truth.
    Synth(SynthArgs),
    /// Segment recordings into normalized pulse dumps.
    Segment(SegmentArgs),
    /// Turn pulse dumps into symbol vectors.
    Symbolize(SymbolizeArgs),
    /// Pairwise symbolic mismatch between symbol vectors.
    Mismatch(MismatchArgs),
    /// Cluster a distance matrix and score class concentration.
    Evaluate(EvaluateArgs),
    /// Concentration and significance over a range of cluster counts.
    Sweep(SweepArgs),
    /// Acoustic-feature baselines over a manifest.
    Baseline,
    /// Every stage from manifest to reports.
    Run,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Preset {
    Separated,
    Null,
    Treatment,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long, value_enum, default_value = "separated")]
    preset: Preset,
    /// Full spec as TOML instead of a preset.
    #[arg(long, conflicts_with = "preset")]
    spec: Option<PathBuf>,
    #[arg(long, default_value_t = 6)]
    subjects: usize,
    #[arg(long)]
    days: Option<u32>,
    #[arg(long)]
    day_seconds: Option<f64>,
    #[arg(long)]
    csv: bool,
}

#[derive(Args, Debug)]
struct SegmentArgs {
    /// Single recording instead of a manifest.
    #[arg(long, requires_all = ["subject", "label"])]
    input: Option<PathBuf>,
    /// Required for CSV input.
    #[arg(long)]
    sample_rate: Option<f64>,
    #[arg(long)]
    subject: Option<String>,
    #[arg(long, default_value_t = 0)]
    day: u32,
    #[arg(long)]
    label: Option<ClassLabel>,
    /// Also write each dump as CSV.
    #[arg(long)]
    csv: bool,
}

#[derive(Args, Debug)]
struct SymbolizeArgs {
    /// Segment dumps, or directories holding `.seg` files.
    #[arg(required = true)]
    segments: Vec<PathBuf>,
}

#[derive(Args, Debug)]
struct MismatchArgs {
    /// Symbol vector file.
    symbols: PathBuf,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    /// Distance matrix CSV.
    distances: PathBuf,
    /// `name,subject,day,label` table naming the matrix rows.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    distances: PathBuf,
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    from: Option<usize>,
    #[arg(long)]
    to: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
}

impl Global {
    fn config(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(p) => PipelineConfig::load(p)?,
            None => PipelineConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        Ok(cfg)
    }

    fn manifest_path(&self) -> Result<&Path> {
        self.manifest
            .as_deref()
            .ok_or_else(|| Error::InvalidParameter("--manifest is required for this command".into()))
    }

    fn options(&self) -> RunOptions {
        RunOptions {
            workers: self.workers,
            cache_dir: if self.no_cache {
                None
            } else {
                Some(self.stage_cache.clone().unwrap_or_else(|| self.out.join("cache")))
            },
        }
    }

    fn out_dir(&self) -> Result<&Path> {
        fs::create_dir_all(&self.out).map_err(|e| Error::Io {
            path: self.out.clone(),
            source: e,
        })?;
        Ok(&self.out)
    }
}

fn synth(g: &Global, a: &SynthArgs) -> Result<()> {
    let seed = g.seed.unwrap_or(0);
    let mut spec = match &a.spec {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::Io { path: p.clone(), source: e })?;
            toml::from_str::<SynthSpec>(&text).map_err(|e| Error::InvalidParameter(format!("synth spec: {e}")))?
        }
        None => match a.preset {
            Preset::Separated => SynthSpec::separated(a.subjects, seed),
            Preset::Null => SynthSpec::null(a.subjects, seed),
            Preset::Treatment => SynthSpec::treatment(a.subjects, seed),
        },
    };
    if let Some(d) = a.days {
        spec.days_per_subject = d;
        for c in spec.classes.iter_mut().filter(|c| c.label == ClassLabel::PostTx) {
            c.first_day = d;
        }
    }
    if let Some(s) = a.day_seconds {
        spec.day_seconds = s;
    }
    if a.csv {
        spec.format = SynthFormat::Csv;
    }
    let out = g.out_dir()?;
    let (manifest, _) = thread_pool(g.workers)?.install(|| generate_cohort(&spec, out))?;
    println!("{} recordings, manifest {}", manifest.entries.len(), out.join(MANIFEST_NAME).display());
    Ok(())
}

fn dump_name(set: &SegmentSet) -> String {
    format!("{}_d{}.seg", set.id.subject, set.id.day)
}

fn segment(g: &Global, a: &SegmentArgs) -> Result<()> {
    let cfg = g.config()?;
    let mode = cfg.normalization.inter_subject();
    let out = g.out_dir()?.to_path_buf();
    let sets: Vec<SegmentSet> = match &a.input {
        Some(path) => {
            let entry = ManifestEntry {
                path: path.clone(),
                subject: a.subject.clone().unwrap_or_default(),
                day: a.day,
                label: a.label.unwrap_or(ClassLabel::Unlabeled),
                sample_rate_hz: a.sample_rate,
                calibration: Vec::new(),
            };
            let rec = load_recording(path, &entry)?;
            let seg = segment_recording(&rec, None, mode, &cfg.segmentation)?;
            if seg.set.segments.is_empty() {
                return Err(Error::EmptyInput("no pulses found in the recording"));
            }
            vec![seg.set]
        }
        None => {
            let manifest = CohortManifest::load(g.manifest_path()?)?;
            let opts = g.options();
            let cache = opts.cache_dir.map(symbolic_mismatch::pipeline::StageCache::new);
            thread_pool(g.workers)?.install(|| {
                let inputs = hash_inputs(&manifest)?;
                segment_stage(&manifest, &inputs, mode, &cfg.segmentation, cache.as_ref())
            })?
            .into_iter()
            .map(|d| d.set)
            .collect()
        }
    };
    for set in &sets {
        let path = out.join(dump_name(set));
        write_segment_dump(&path, set)?;
        if a.csv {
            write_segment_csv(&path.with_extension("csv"), set)?;
        }
        println!("{}: {} pulses of length {} -> {}", set.id, set.segments.len(), set.width(), path.display());
    }
    Ok(())
}

fn dump_paths(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| Error::Io { path: p.clone(), source: e })?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "seg"))
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyInput("no segment dumps given"));
    }
    Ok(out)
}

fn symbolize(g: &Global, a: &SymbolizeArgs) -> Result<()> {
    let cfg = g.config()?;
    let paths = dump_paths(&a.segments)?;
    let days = thread_pool(g.workers)?.install(|| {
        let sets = paths
            .par_iter()
            .map(|p| {
                let set = read_segment_dump(p)?;
                let key = symbolic_mismatch::pipeline::file_digest(p)?;
                Ok(SegmentedDay { key, set })
            })
            .collect::<Vec<Result<_>>>()
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        symbolize_stage(&sets, &cfg.symbolization, cfg.seed, None)
    })?;
    let vectors: Vec<_> = days.into_iter().map(|d| d.vector).collect();
    let path = g.out_dir()?.join("symbols.txt");
    write_symbol_vectors(&path, &vectors)?;
    for v in &vectors {
        println!("{}: k = {}", v.id, v.k());
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn mismatch(g: &Global, a: &MismatchArgs) -> Result<()> {
    let cfg = g.config()?;
    let days: Vec<SymbolizedDay> = read_symbol_vectors(&a.symbols)?
        .into_iter()
        .map(|v| SymbolizedDay {
            key: v.to_text(),
            pulses: 0,
            vector: v,
        })
        .collect();
    let dm = thread_pool(g.workers)?.install(|| mismatch_stage(&days, cfg.mismatch.band, None))?;
    let path = g.out_dir()?.join("mismatch.csv");
    dm.write_csv(&path)?;
    println!("{} x {} mismatch matrix -> {}", dm.len(), dm.len(), path.display());
    Ok(())
}

fn evaluate(g: &Global, a: &EvaluateArgs) -> Result<()> {
    let cfg = g.config()?;
    let dm = read_matrix(&a.distances, a.labels.as_deref())?;
    let n = a.n.unwrap_or(cfg.evaluation.n);
    let trials = a.trials.unwrap_or(cfg.evaluation.trials);
    let out = g.out_dir()?;
    let (report, rrdm) = thread_pool(g.workers)?.install(|| concentration_report(&dm, n, trials, cfg.seed, "all"))?;
    let assignment = cluster_subject_days(&dm, n)?;
    write_json(&out.join("report.json"), &report)?;
    write_text(&out.join("concentration.csv"), &concentration_csv(std::slice::from_ref(&report)))?;
    write_text(&out.join("heatmap.csv"), &heatmap_csv(&assignment))?;
    write_text(&out.join("assignment.csv"), &assignment_csv(&assignment))?;
    if let Some(r) = &rrdm {
        write_text(&out.join("ecdf.csv"), &ecdf_csv(r))?;
    }
    println!(
        "n = {n}: class concentration {}, subject concentration {}{}",
        report.total_class_conc,
        report.total_subj_conc,
        report.p_display.map(|p| format!(", p = {p}")).unwrap_or_default()
    );
    Ok(())
}

fn sweep(g: &Global, a: &SweepArgs) -> Result<()> {
    let cfg = g.config()?;
    let dm: DistanceMatrix = read_matrix(&a.distances, a.labels.as_deref())?;
    let [d_from, d_to] = cfg.evaluation.sweep.unwrap_or([2, 40]);
    let (from, to) = (a.from.unwrap_or(d_from), a.to.unwrap_or(d_to));
    if from == 0 || to < from {
        return Err(Error::InvalidParameter(format!("sweep range [{from}, {to}] must satisfy 1 <= from <= to")));
    }
    let sets: Vec<(Comparison, DistanceMatrix)> =
        [Comparison::PreTxVsControl, Comparison::PostTxVsControl, Comparison::PreTxVsPostTx]
            .into_iter()
            .filter(|c| c.labels().iter().all(|l| dm.ids.iter().any(|id| id.label == *l)))
            .map(|c| (c, c.subset(&dm)))
            .collect();
    if sets.is_empty() {
        return Err(Error::InvalidMatrix("no two-class comparison applies to these labels".into()));
    }
    let ns: Vec<usize> = (from..=to).collect();
    let trials = a.trials.unwrap_or(cfg.evaluation.trials);
    let result = thread_pool(g.workers)?.install(|| sensitivity_sweep(&sets, &ns, trials, cfg.seed))?;
    let out = g.out_dir()?;
    write_text(&out.join("sweep.csv"), &sweep_csv(&result))?;
    write_json(&out.join("sweep.json"), &result)?;
    println!("{} rows -> {}", result.rows.len(), out.join("sweep.csv").display());
    Ok(())
}

fn baseline(g: &Global) -> Result<()> {
    let cfg = g.config()?;
    let report = run_baseline(&cfg, g.manifest_path()?, &g.out, &g.options())?;
    for m in &report.methods {
        println!("{} n = {}: class concentration {}", m.method, m.n, m.total_class_conc);
    }
    Ok(())
}

fn run(g: &Global) -> Result<()> {
    let cfg = g.config()?;
    let report = run_pipeline(&cfg, g.manifest_path()?, &g.out, &g.options())?;
    for r in &report.comparisons {
        println!(
            "{} n = {}: class concentration {}, p = {}",
            r.comparison,
            r.n,
            r.total_class_conc,
            r.p_display.clone().unwrap_or_else(|| "-".into())
        );
    }
    println!("reports in {}", g.out.display());
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Synth(a) => synth(g, a),
        Command::Segment(a) => segment(g, a),
        Command::Symbolize(a) => symbolize(g, a),
        Command::Mismatch(a) => mismatch(g, a),
        Command::Evaluate(a) => evaluate(g, a),
        Command::Sweep(a) => sweep(g, a),
        Command::Baseline => baseline(g),
        Command::Run => run(g),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match panic::catch_unwind(|| dispatch(&cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(_) => {
            eprintln!("error: internal failure");
            ExitCode::from(3)
        }
    }
}
