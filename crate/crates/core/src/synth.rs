//! Synthetic cohorts with known pulse-shape alphabets, so the whole
//! pipeline can be exercised without clinical recordings.
//!
//! A subject-day is silence interleaved with voiced runs. Each run has one
//! pitch, rounded to a whole number of samples per period, and is a train
//! of single-period pulses. Templates come in bursts: each pulse keeps the
//! previous template with probability `1 - 1/burst_pulses`, otherwise it is
//! redrawn from the class mixture, so long-run frequencies equal the weights. Every template peaks at phase 0, so detected peaks fall
//! on pulse boundaries. A run opens and closes with half a period so that
//! its first and last boundary peaks are interior samples.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_distr::{Distribution, Normal, WeightedIndex};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::write_json;
use crate::ingest::{write_csv, write_wav, CohortManifest, ManifestEntry};
use crate::label::{ClassLabel, SubjectDay};
use crate::seed::{derive, tag};

/// Gaussian bump on the unit phase circle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: f64,
    pub width: f64,
    pub amplitude: f64,
}

/// A one-period pulse prototype: a main bump at phase 0 plus extras.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Template {
    pub name: String,
    pub bumps: Vec<Bump>,
}

impl Template {
    pub fn new(name: &str, bumps: &[(f64, f64, f64)]) -> Self {
        Template {
            name: name.to_string(),
            bumps: bumps
                .iter()
                .map(|&(center, width, amplitude)| Bump {
                    center,
                    width,
                    amplitude,
                })
                .collect(),
        }
    }

    /// Periodic value at `phase` (any real; wrapped to one period).
    pub fn value(&self, phase: f64) -> f64 {
        self.bumps
            .iter()
            .map(|b| {
                let mut d = (phase - b.center).rem_euclid(1.0);
                if d > 0.5 {
                    d -= 1.0;
                }
                b.amplitude * (-d * d / (2.0 * b.width * b.width)).exp()
            })
            .sum()
    }

    /// One period sampled at `period` points starting at phase 0.
    pub fn render(&self, period: usize) -> Vec<f64> {
        (0..period).map(|k| self.value(k as f64 / period as f64)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassSpec {
    pub label: ClassLabel,
    pub templates: Vec<Template>,
    pub weights: Vec<f64>,
    pub subjects: usize,
    /// Subject ids are `<prefix><index>`; classes may share a prefix so
    /// one subject can appear under several labels.
    pub subject_prefix: String,
    /// First day index for this class.
    #[serde(default)]
    pub first_day: u32,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthFormat {
    #[default]
    Wav,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub classes: Vec<ClassSpec>,
    pub days_per_subject: u32,
    pub sample_rate_hz: u32,
    pub day_seconds: f64,
    pub voiced_fraction: f64,
    pub run_seconds: f64,
    pub pitch_hz: (f64, f64),
    pub amplitude: (f64, f64),
    /// Gaussian noise std relative to the run amplitude.
    pub noise: f64,
    /// Mean number of consecutive pulses sharing a template (at least 1).
    pub burst_pulses: f64,
    pub seed: u64,
    #[serde(default)]
    pub format: SynthFormat,
}

/// Shortest silence between two runs, so voicing detection keeps them apart.
pub const MIN_GAP_S: f64 = 0.2;

/// Two shape families with nothing in common.
pub fn alphabet_a() -> Vec<Template> {
    vec![
        Template::new("a1", &[(0.0, 0.04, 1.0), (0.35, 0.08, 0.55)]),
        Template::new("a2", &[(0.0, 0.05, 1.0), (0.55, 0.06, -0.5), (0.75, 0.05, 0.3)]),
    ]
}

pub fn alphabet_b() -> Vec<Template> {
    vec![
        Template::new("b1", &[(0.0, 0.12, 1.0), (0.5, 0.1, -0.7)]),
        Template::new("b2", &[(0.0, 0.025, 1.0), (0.2, 0.04, -0.4), (0.65, 0.07, 0.6)]),
    ]
}

impl SynthSpec {
    fn base(classes: Vec<ClassSpec>, seed: u64) -> Self {
        SynthSpec {
            classes,
            days_per_subject: 4,
            sample_rate_hz: 8000,
            day_seconds: 60.0,
            voiced_fraction: 0.1,
            run_seconds: 1.0,
            pitch_hz: (100.0, 200.0),
            amplitude: (0.3, 0.8),
            noise: 0.01,
            burst_pulses: 8.0,
            seed,
            format: SynthFormat::Wav,
        }
    }

    /// Control versus PreTx with disjoint template alphabets.
    pub fn separated(subjects_per_class: usize, seed: u64) -> Self {
        let classes = vec![
            ClassSpec {
                label: ClassLabel::Control,
                templates: alphabet_a(),
                weights: vec![0.6, 0.4],
                subjects: subjects_per_class,
                subject_prefix: "C".into(),
                first_day: 0,
            },
            ClassSpec {
                label: ClassLabel::PreTx,
                templates: alphabet_b(),
                weights: vec![0.6, 0.4],
                subjects: subjects_per_class,
                subject_prefix: "P".into(),
                first_day: 0,
            },
        ];
        Self::base(classes, seed)
    }

    /// Control versus PreTx drawn from the same alphabet and weights.
    pub fn null(subjects_per_class: usize, seed: u64) -> Self {
        let mut spec = Self::separated(subjects_per_class, seed);
        spec.classes[1].templates = alphabet_a();
        spec
    }

    /// Controls plus patients recorded before (alphabet B) and after
    /// (alphabet A, like the controls) treatment.
    pub fn treatment(subjects_per_class: usize, seed: u64) -> Self {
        let mut spec = Self::separated(subjects_per_class, seed);
        spec.classes.push(ClassSpec {
            label: ClassLabel::PostTx,
            templates: alphabet_a(),
            weights: vec![0.6, 0.4],
            subjects: subjects_per_class,
            subject_prefix: "P".into(),
            first_day: spec.days_per_subject,
        });
        spec
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.classes.is_empty() {
            return Err("at least one class is required".into());
        }
        for c in &self.classes {
            if c.templates.is_empty() || c.templates.len() != c.weights.len() {
                return Err(format!("class {}: need one weight per template", c.label));
            }
            if c.weights.iter().any(|w| !(*w >= 0.0)) || (c.weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return Err(format!("class {}: mixing weights must be nonnegative and sum to 1", c.label));
            }
        }
        if !(self.voiced_fraction > 0.0 && self.voiced_fraction <= 1.0) {
            return Err(format!("voiced_fraction must lie in (0, 1], got {}", self.voiced_fraction));
        }
        let (lo, hi) = self.pitch_hz;
        if !(lo > 0.0 && hi >= lo && 2.0 * hi < self.sample_rate_hz as f64) {
            return Err("pitch range must be positive and below half the sample rate".into());
        }
        let (alo, ahi) = self.amplitude;
        if !(alo > 0.0 && ahi >= alo && ahi <= 1.0) {
            return Err("amplitude range must lie in (0, 1]".into());
        }
        if !(self.burst_pulses >= 1.0) {
            return Err("burst_pulses must be at least 1".into());
        }
        if !(self.noise >= 0.0) || !(self.day_seconds > 0.0) || !(self.run_seconds > 0.0) {
            return Err("noise must be nonnegative; day_seconds and run_seconds positive".into());
        }
        if self.days_per_subject == 0 {
            return Err("days_per_subject must be positive".into());
        }
        Ok(())
    }

    /// Every subject-day with its class, in generation order.
    pub fn subject_days(&self) -> Vec<(SubjectDay, &ClassSpec)> {
        let mut out = Vec::new();
        for c in &self.classes {
            for s in 0..c.subjects {
                for d in 0..self.days_per_subject {
                    let id = SubjectDay::new(format!("{}{:02}", c.subject_prefix, s + 1), c.first_day + d, c.label);
                    out.push((id, c));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTruth {
    pub start_sample: usize,
    pub end_sample: usize,
    pub pitch_hz: f64,
    pub period_samples: usize,
    pub pulses: usize,
    /// Template name of every pulse, in order.
    pub templates: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DayTruth {
    pub subject: String,
    pub day: u32,
    pub label: ClassLabel,
    pub file: PathBuf,
    pub samples: usize,
    pub runs: Vec<RunTruth>,
    pub template_counts: BTreeMap<String, usize>,
}

impl DayTruth {
    pub fn total_pulses(&self) -> usize {
        self.runs.iter().map(|r| r.pulses).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub spec: SynthSpec,
    pub days: Vec<DayTruth>,
}

/// Render one voiced run: half a period, `pulses` whole periods, half a period.
pub fn render_run(templates: &[Template], choice: &[usize], period: usize, amplitude: f64) -> Vec<f64> {
    let half = period / 2;
    let mut out = Vec::with_capacity(period * (choice.len() + 1));
    let first = &templates[choice[0]];
    out.extend((half..period).map(|k| amplitude * first.value(k as f64 / period as f64 - 1.0)));
    for &c in choice {
        out.extend(templates[c].render(period).into_iter().map(|v| amplitude * v));
    }
    let last = &templates[*choice.last().unwrap()];
    out.extend((0..half).map(|k| amplitude * last.value(1.0 + k as f64 / period as f64)));
    out
}

/// Samples and ground truth for one subject-day.
pub fn synthesize_day(spec: &SynthSpec, id: &SubjectDay, class: &ClassSpec) -> Result<(Vec<f64>, DayTruth)> {
    let fs = spec.sample_rate_hz as f64;
    let mut rng = crate::seed::rng(derive(spec.seed, "synth", &[tag(&id.subject), id.day as u64]));
    let total = (spec.day_seconds * fs).round() as usize;
    let voiced_total = (spec.voiced_fraction * total as f64).round() as usize;
    let silence_total = total - voiced_total;
    let min_gap = (MIN_GAP_S * fs).round() as usize;
    let mut runs = if spec.voiced_fraction >= 1.0 {
        1
    } else {
        ((spec.voiced_fraction * spec.day_seconds / spec.run_seconds).round() as usize).max(1)
    };
    while runs > 1 && silence_total < min_gap * (runs - 1) {
        runs -= 1;
    }

    // Silence: fixed minimum between runs plus random shares of the rest.
    let spare = silence_total - min_gap * runs.saturating_sub(1);
    let weights: Vec<f64> = (0..=runs).map(|_| rng.gen_range(0.05..1.0)).collect();
    let wsum: f64 = weights.iter().sum();
    let mut gaps: Vec<usize> = weights.iter().map(|w| (w / wsum * spare as f64).floor() as usize).collect();
    for g in gaps.iter_mut().take(runs).skip(1) {
        *g += min_gap;
    }
    if spec.voiced_fraction >= 1.0 {
        gaps.iter_mut().for_each(|g| *g = 0);
    }

    let picker = WeightedIndex::new(&class.weights).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut samples = Vec::with_capacity(total);
    let mut truths = Vec::with_capacity(runs);
    let mut counts: BTreeMap<String, usize> = class.templates.iter().map(|t| (t.name.clone(), 0)).collect();
    let run_len = voiced_total / runs;
    for r in 0..runs {
        samples.extend(std::iter::repeat(0.0).take(gaps[r]));
        let f0 = rng.gen_range(spec.pitch_hz.0..=spec.pitch_hz.1);
        let period = ((fs / f0).round() as usize).max(4);
        let pulses = (run_len / period).saturating_sub(1).max(1);
        let mut choice: Vec<usize> = Vec::with_capacity(pulses);
        for k in 0..pulses {
            let redraw = k == 0 || rng.gen::<f64>() < 1.0 / spec.burst_pulses;
            choice.push(if redraw { picker.sample(&mut rng) } else { choice[k - 1] });
        }
        let amp = rng.gen_range(spec.amplitude.0..=spec.amplitude.1);
        let mut run = render_run(&class.templates, &choice, period, amp);
        if spec.noise > 0.0 {
            let normal = Normal::new(0.0, spec.noise * amp).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            run.iter_mut().for_each(|x| *x += normal.sample(&mut rng));
        }
        let start = samples.len();
        samples.extend(run.iter().map(|x| x.clamp(-1.0, 1.0)));
        let names: Vec<String> = choice.iter().map(|&c| class.templates[c].name.clone()).collect();
        for n in &names {
            *counts.get_mut(n).unwrap() += 1;
        }
        truths.push(RunTruth {
            start_sample: start,
            end_sample: samples.len(),
            pitch_hz: fs / period as f64,
            period_samples: period,
            pulses,
            templates: names,
        });
    }
    samples.extend(std::iter::repeat(0.0).take(gaps[runs]));
    let ext = match spec.format {
        SynthFormat::Wav => "wav",
        SynthFormat::Csv => "csv",
    };
    let truth = DayTruth {
        subject: id.subject.clone(),
        day: id.day,
        label: id.label,
        file: PathBuf::from(format!("{}_d{}.{ext}", id.subject, id.day)),
        samples: samples.len(),
        runs: truths,
        template_counts: counts,
    };
    Ok((samples, truth))
}

pub const MANIFEST_NAME: &str = "manifest.toml";
pub const GROUND_TRUTH_NAME: &str = "ground_truth.json";

/// Write every subject-day, a cohort manifest and a ground-truth sidecar into `out_dir`.
pub fn generate_cohort(spec: &SynthSpec, out_dir: &Path) -> Result<(CohortManifest, GroundTruth)> {
    spec.validate().map_err(Error::InvalidParameter)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let jobs = spec.subject_days();
    let days = jobs
        .par_iter()
        .map(|(id, class)| {
            let (samples, truth) = synthesize_day(spec, id, class)?;
            let path = out_dir.join(&truth.file);
            match spec.format {
                SynthFormat::Wav => write_wav(&path, &samples, spec.sample_rate_hz)?,
                SynthFormat::Csv => write_csv(&path, &samples)?,
            }
            Ok(truth)
        })
        .collect::<Result<Vec<DayTruth>>>()?;
    let manifest = CohortManifest {
        entries: days
            .iter()
            .map(|d| ManifestEntry {
                path: d.file.clone(),
                subject: d.subject.clone(),
                day: d.day,
                label: d.label,
                sample_rate_hz: match spec.format {
                    SynthFormat::Wav => None,
                    SynthFormat::Csv => Some(spec.sample_rate_hz as f64),
                },
                calibration: Vec::new(),
            })
            .collect(),
        base_dir: out_dir.to_path_buf(),
    };
    manifest.save(&out_dir.join(MANIFEST_NAME))?;
    let truth = GroundTruth {
        spec: spec.clone(),
        days,
    };
    write_json(&out_dir.join(GROUND_TRUTH_NAME), &truth)?;
    Ok((manifest, truth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{NormalizationMode, RawRecording};
    use crate::segment::{segment_recording, SegmentationConfig};

    fn one_template_spec() -> SynthSpec {
        let mut spec = SynthSpec::separated(1, 5);
        spec.classes.truncate(1);
        spec.classes[0].templates.truncate(1);
        spec.classes[0].weights = vec![1.0];
        spec.noise = 0.0;
        spec.voiced_fraction = 1.0;
        spec.day_seconds = 2.0;
        spec.days_per_subject = 1;
        spec
    }

    #[test]
    fn templates_peak_at_phase_zero() {
        for t in alphabet_a().iter().chain(&alphabet_b()) {
            let xs = t.render(80);
            let imax = (0..80).max_by(|&a, &b| xs[a].total_cmp(&xs[b])).unwrap();
            assert_eq!(imax, 0, "{}", t.name);
            // Continuous across the period boundary.
            assert!((t.value(1.0 - 1e-9) - t.value(0.0)).abs() < 1e-6);
        }
    }

    #[test]
    fn clean_single_template_round_trip() {
        let spec = one_template_spec();
        let (id, class) = spec.subject_days().remove(0);
        let (xs, truth) = synthesize_day(&spec, &id, class).unwrap();
        assert_eq!(truth.runs.len(), 1);
        let period = truth.runs[0].period_samples;
        let rec = RawRecording::new(xs, spec.sample_rate_hz as f64, &id.subject, id.day, id.label).unwrap();
        let seg = segment_recording(&rec, None, NormalizationMode::ZScore, &SegmentationConfig::default()).unwrap();
        assert_eq!(seg.set.segments.len(), truth.total_pulses());
        let mut want = class.templates[0].render(period);
        crate::ingest::zscore_in_place(&mut want).unwrap();
        for s in &seg.set.segments {
            assert_eq!(s.values.len(), period);
            let dev = s.values.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(dev < 1e-6, "max deviation {dev}");
        }
    }

    #[test]
    fn pulse_counts_match_segmentation() {
        let mut spec = SynthSpec::separated(1, 8);
        spec.day_seconds = 30.0;
        spec.days_per_subject = 1;
        for (id, class) in spec.subject_days() {
            let (xs, truth) = synthesize_day(&spec, &id, class).unwrap();
            let rec = RawRecording::new(xs, spec.sample_rate_hz as f64, &id.subject, id.day, id.label).unwrap();
            let seg = segment_recording(&rec, None, NormalizationMode::ZScore, &SegmentationConfig::default()).unwrap();
            assert_eq!(seg.regions.len(), truth.runs.len());
            for (region, run) in seg.regions.iter().zip(&truth.runs) {
                assert!(region.pulses.abs_diff(run.pulses) <= 1, "{} vs {}", region.pulses, run.pulses);
            }
            let frac = truth.runs.iter().map(|r| r.end_sample - r.start_sample).sum::<usize>() as f64 / truth.samples as f64;
            assert!((frac - 0.1).abs() < 0.02, "voiced fraction {frac}");
        }
    }

    #[test]
    fn cohort_files_are_deterministic() {
        let mut spec = SynthSpec::separated(1, 2);
        spec.day_seconds = 5.0;
        spec.days_per_subject = 2;
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let (manifest, truth) = generate_cohort(&spec, a.path()).unwrap();
        generate_cohort(&spec, b.path()).unwrap();
        assert_eq!(manifest.entries.len(), 4);
        assert_eq!(truth.days.len(), 4);
        for name in ["C01_d0.wav", "P01_d1.wav", MANIFEST_NAME, GROUND_TRUTH_NAME] {
            let x = std::fs::read(a.path().join(name)).unwrap();
            assert_eq!(x, std::fs::read(b.path().join(name)).unwrap(), "{name}");
        }
        let loaded = CohortManifest::load(&a.path().join(MANIFEST_NAME)).unwrap();
        assert_eq!(loaded.entries, manifest.entries);
    }

    #[test]
    fn validation() {
        let mut spec = SynthSpec::separated(1, 0);
        assert!(spec.validate().is_ok());
        spec.classes[0].weights = vec![0.5, 0.6];
        assert!(spec.validate().is_err());
        let mut spec = SynthSpec::separated(1, 0);
        spec.voiced_fraction = 0.0;
        assert!(spec.validate().is_err());
    }
}
