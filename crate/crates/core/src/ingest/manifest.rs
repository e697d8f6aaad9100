use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::ClassLabel;

/// One `[[recording]]` table of a cohort manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Relative paths are resolved against the manifest's directory.
    pub path: PathBuf,
    pub subject: String,
    pub day: u32,
    pub label: ClassLabel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_rate_hz: Option<f64>,
    /// `(signal-unit RMS, dbSPL)` pairs from a sound level meter.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub calibration: Vec<[f64; 2]>,
}

impl ManifestEntry {
    pub fn calibration_pairs(&self) -> Vec<(f64, f64)> {
        self.calibration.iter().map(|p| (p[0], p[1])).collect()
    }
}

/// A list of recordings with their subject, day and class metadata.
///
/// Stored as TOML:
///
/// ```toml
/// [[recording]]
/// path = "S01_d0.wav"
/// subject = "S01"
/// day = 0
/// label = "PreTx"
/// calibration = [[0.01, 60.0], [0.1, 80.0]]
/// ```
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CohortManifest {
    #[serde(rename = "recording", default)]
    pub entries: Vec<ManifestEntry>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl CohortManifest {
    pub fn parse(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut manifest: CohortManifest =
            toml::from_str(text).map_err(|e| Error::Parse(format!("manifest: {e}")))?;
        manifest.base_dir = base_dir.into();
        manifest.validate_ids()?;
        Ok(manifest)
    }

    /// Read and validate a manifest, checking that every referenced file exists.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let manifest = Self::parse(&text, base)?;
        for entry in &manifest.entries {
            let p = manifest.resolve(entry);
            if !p.is_file() {
                return Err(Error::Unreadable {
                    path: p,
                    reason: "file referenced by manifest does not exist".into(),
                });
            }
        }
        Ok(manifest)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))?;
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn resolve(&self, entry: &ManifestEntry) -> PathBuf {
        if entry.path.is_absolute() {
            entry.path.clone()
        } else {
            self.base_dir.join(&entry.path)
        }
    }

    fn validate_ids(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for e in &self.entries {
            if !seen.insert((e.subject.as_str(), e.day)) {
                return Err(Error::Parse(format!(
                    "manifest lists subject {} day {} twice",
                    e.subject, e.day
                )));
            }
        }
        Ok(())
    }
}
