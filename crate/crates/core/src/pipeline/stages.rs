use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cache::{file_digest, stage_key, StageCache};
use crate::baselines::{compute_maf, compute_vaf, FeatureVector, VafConfig};
use crate::distance::{BandRule, DistanceMatrix};
use crate::error::{Error, Result};
use crate::ingest::{load_recording, Calibration, CohortManifest, ManifestEntry, NormalizationMode};
use crate::label::SubjectDay;
use crate::mismatch::mismatch_matrix;
use crate::segment::{read_segment_dump, segment_recording, write_segment_dump, SegmentSet, SegmentationConfig};
use crate::symbolize::{read_symbol_vectors, symbolize_day, write_symbol_vectors, SymbolVector, SymbolizeConfig};

/// Results in input order; the first failure in that order wins, so the
/// reported error does not depend on scheduling.
fn first_error<T>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    results.into_iter().collect()
}

/// One manifest recording with the digest of its file bytes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputFile {
    pub entry: ManifestEntry,
    pub sha256: String,
}

impl InputFile {
    pub fn id(&self) -> SubjectDay {
        SubjectDay::new(self.entry.subject.clone(), self.entry.day, self.entry.label)
    }
}

/// Digest every file a manifest references.
pub fn hash_inputs(manifest: &CohortManifest) -> Result<Vec<InputFile>> {
    let out = manifest
        .entries
        .par_iter()
        .map(|e| {
            let sha256 = file_digest(&manifest.resolve(e))?;
            Ok(InputFile { entry: e.clone(), sha256 })
        })
        .collect();
    first_error(out)
}

/// The entry's level mapping: fitted from its calibration pairs, or none.
pub fn entry_calibration(entry: &ManifestEntry) -> Result<Option<Calibration>> {
    if entry.calibration.is_empty() {
        Ok(None)
    } else {
        Calibration::fit(&entry.calibration_pairs()).map(Some)
    }
}

#[derive(Clone, Debug)]
pub struct SegmentedDay {
    pub key: String,
    pub set: SegmentSet,
}

/// Segment and normalize every recording.
pub fn segment_stage(
    manifest: &CohortManifest,
    inputs: &[InputFile],
    mode: NormalizationMode,
    cfg: &SegmentationConfig,
    cache: Option<&StageCache>,
) -> Result<Vec<SegmentedDay>> {
    let out = inputs
        .par_iter()
        .map(|input| {
            let id = input.id();
            segment_one(manifest, input, mode, cfg, cache).map_err(|e| e.in_stage("segment", id.to_string()))
        })
        .collect();
    first_error(out)
}

fn segment_one(
    manifest: &CohortManifest,
    input: &InputFile,
    mode: NormalizationMode,
    cfg: &SegmentationConfig,
    cache: Option<&StageCache>,
) -> Result<SegmentedDay> {
    let e = &input.entry;
    let key = stage_key(
        "segment",
        &(&input.sha256, &e.subject, e.day, e.label, e.sample_rate_hz, &e.calibration, mode.as_str(), cfg),
    );
    let compute = || {
        let rec = load_recording(&manifest.resolve(e), e)?;
        let seg = segment_recording(&rec, entry_calibration(e)?, mode, cfg)?;
        if seg.set.segments.is_empty() {
            return Err(Error::EmptyInput("no pulses found in the recording"));
        }
        if seg.dropped_constant > 0 {
            log::warn!("{}: dropped {} constant segments", rec.id(), seg.dropped_constant);
        }
        Ok(seg.set)
    };
    let set = match cache {
        Some(c) => c.get_or_compute("segment", &key, "seg", read_segment_dump, write_segment_dump, compute)?,
        None => compute()?,
    };
    Ok(SegmentedDay { key, set })
}

#[derive(Clone, Debug)]
pub struct SymbolizedDay {
    pub key: String,
    pub pulses: usize,
    pub vector: SymbolVector,
}

/// Symbolize every subject-day's pulses.
pub fn symbolize_stage(
    days: &[SegmentedDay],
    cfg: &SymbolizeConfig,
    seed: u64,
    cache: Option<&StageCache>,
) -> Result<Vec<SymbolizedDay>> {
    let out = days
        .par_iter()
        .map(|day| {
            let key = stage_key("symbolize", &(&day.key, cfg, seed));
            let compute = || symbolize_day(&day.set, cfg, seed).map(|(v, _)| v);
            let read = |p: &Path| {
                read_symbol_vectors(p)?
                    .pop()
                    .ok_or(Error::EmptyInput("cached symbol file is empty"))
            };
            let write = |p: &Path, v: &SymbolVector| write_symbol_vectors(p, std::slice::from_ref(v));
            let vector = match cache {
                Some(c) => c.get_or_compute("symbolize", &key, "sym", read, write, compute),
                None => compute(),
            }
            .map_err(|e| e.in_stage("symbolize", day.set.id.to_string()))?;
            Ok(SymbolizedDay {
                key,
                pulses: day.set.segments.len(),
                vector,
            })
        })
        .collect();
    first_error(out)
}

/// Pairwise symbolic mismatch over all symbolized days.
pub fn mismatch_stage(days: &[SymbolizedDay], band: BandRule, cache: Option<&StageCache>) -> Result<DistanceMatrix> {
    let keys: Vec<&str> = days.iter().map(|d| d.key.as_str()).collect();
    let key = stage_key("mismatch", &(&keys, band));
    let compute = || {
        let vectors: Vec<SymbolVector> = days.iter().map(|d| d.vector.clone()).collect();
        mismatch_matrix(&vectors, band)
    };
    let write = |p: &Path, m: &DistanceMatrix| m.write_binary(p);
    match cache {
        Some(c) => c.get_or_compute("mismatch", &key, "bin", DistanceMatrix::read_binary, write, compute),
        None => compute(),
    }
    .map_err(|e| e.in_stage("mismatch", format!("{} subject-days", days.len())))
}

/// Window features (VAF) and day means (MAF) of every recording.
pub fn feature_stage(
    manifest: &CohortManifest,
    cfg: &VafConfig,
) -> Result<(Vec<FeatureVector>, Vec<FeatureVector>)> {
    let out: Vec<Result<(Vec<FeatureVector>, FeatureVector)>> = manifest
        .entries
        .par_iter()
        .map(|e| {
            let run = || {
                let rec = load_recording(&manifest.resolve(e), e)?;
                let windows = compute_vaf(&rec, entry_calibration(e)?, cfg)?;
                let day = compute_maf(&windows)?;
                Ok((windows, day))
            };
            run().map_err(|err: Error| err.in_stage("baseline", format!("{}:{}:{}", e.subject, e.day, e.label)))
        })
        .collect();
    let mut vaf = Vec::new();
    let mut maf = Vec::new();
    for (w, d) in first_error(out)? {
        vaf.extend(w);
        maf.push(d);
    }
    Ok((vaf, maf))
}
