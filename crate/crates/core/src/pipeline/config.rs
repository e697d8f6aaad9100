use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::baselines::VafConfig;
use crate::distance::BandRule;
use crate::error::{Error, Result};
use crate::eval::Comparison;
use crate::ingest::NormalizationMode;
use crate::segment::SegmentationConfig;
use crate::symbolize::SymbolizeConfig;

/// Amplitude normalization of pulses before symbolization.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationChoice {
    /// Z-score for comparisons across subjects, calibrated dB scaling
    /// within one subject.
    #[default]
    Auto,
    Zscore,
    Dbspl,
}

impl NormalizationChoice {
    pub fn inter_subject(self) -> NormalizationMode {
        match self {
            NormalizationChoice::Dbspl => NormalizationMode::DbSplScaled,
            _ => NormalizationMode::ZScore,
        }
    }

    pub fn intra_subject(self) -> NormalizationMode {
        match self {
            NormalizationChoice::Zscore => NormalizationMode::ZScore,
            _ => NormalizationMode::DbSplScaled,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonChoice {
    PretxCon,
    PosttxCon,
    PerPatient,
}

impl ComparisonChoice {
    pub fn comparison(self) -> Option<Comparison> {
        match self {
            ComparisonChoice::PretxCon => Some(Comparison::PreTxVsControl),
            ComparisonChoice::PosttxCon => Some(Comparison::PostTxVsControl),
            ComparisonChoice::PerPatient => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MismatchConfig {
    pub band: BandRule,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationConfig {
    /// Cluster count for the headline reports.
    pub n: usize,
    /// Inclusive `[from, to]` range of cluster counts to sweep; omit to skip.
    pub sweep: Option<[usize; 2]>,
    pub trials: usize,
    pub comparisons: Vec<ComparisonChoice>,
    /// Cluster count for the per-patient PreTx/PostTx comparison.
    pub intra_n: usize,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        EvaluationConfig {
            n: 18,
            sweep: Some([2, 40]),
            trials: 5000,
            comparisons: vec![ComparisonChoice::PretxCon, ComparisonChoice::PosttxCon, ComparisonChoice::PerPatient],
            intra_n: 3,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineConfig {
    pub vaf: VafConfig,
    /// Cluster count; defaults to `evaluation.n`.
    pub n: Option<usize>,
}

/// Every tunable of a run. Loaded from TOML; missing keys take defaults,
/// unknown keys are rejected.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub normalization: NormalizationChoice,
    pub segmentation: SegmentationConfig,
    pub symbolization: SymbolizeConfig,
    pub mismatch: MismatchConfig,
    pub evaluation: EvaluationConfig,
    pub baseline: BaselineConfig,
}

impl PipelineConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: PipelineConfig = toml::from_str(text).map_err(|e| Error::InvalidParameter(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config always serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |section: &str, msg: String| Err(Error::InvalidParameter(format!("[{section}] {msg}")));
        if let Err(m) = self.segmentation.validate() {
            return bad("segmentation", m);
        }
        if let Err(m) = self.symbolization.validate() {
            return bad("symbolization", m);
        }
        if let Err(m) = self.baseline.vaf.validate() {
            return bad("baseline.vaf", m);
        }
        if let BandRule::Fraction(f) = self.mismatch.band {
            if !(f >= 0.0) {
                return bad("mismatch", "band fraction must be nonnegative".into());
            }
        }
        let e = &self.evaluation;
        if e.n == 0 {
            return bad("evaluation", "n must be positive".into());
        }
        if let Some([a, b]) = e.sweep {
            if a == 0 || b < a {
                return bad("evaluation", format!("sweep range [{a}, {b}] must satisfy 1 <= from <= to"));
            }
        }
        if e.intra_n == 0 {
            return bad("evaluation", "intra_n must be positive".into());
        }
        if e.comparisons.is_empty() {
            return bad("evaluation", "at least one comparison is required".into());
        }
        if self.baseline.n == Some(0) {
            return bad("baseline", "n must be positive".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = PipelineConfig::default();
        assert_eq!(PipelineConfig::parse(&cfg.to_toml()).unwrap(), cfg);
        assert_eq!(cfg.symbolization.subsample_size, 3000);
        assert_eq!(cfg.symbolization.cut_fraction, 0.30);
        assert_eq!(cfg.evaluation.trials, 5000);
        assert_eq!(cfg.evaluation.sweep, Some([2, 40]));
    }

    #[test]
    fn partial_file_takes_defaults() {
        let cfg = PipelineConfig::parse("seed = 7\n[evaluation]\nn = 6\ntrials = 100\n").unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.evaluation.n, 6);
        assert_eq!(cfg.segmentation, SegmentationConfig::default());
    }

    #[test]
    fn explicit_errors() {
        let unknown = PipelineConfig::parse("[evaluation]\nclusters = 3\n").unwrap_err().to_string();
        assert!(unknown.contains("clusters"), "{unknown}");
        let range = PipelineConfig::parse("[evaluation]\nsweep = [5, 2]\n").unwrap_err().to_string();
        assert!(range.contains("sweep"), "{range}");
        let cut = PipelineConfig::parse("[symbolization]\ncut_fraction = 1.5\n").unwrap_err().to_string();
        assert!(cut.contains("cut_fraction"), "{cut}");
        assert_eq!(PipelineConfig::parse("seed = -1").unwrap_err().exit_code(), 1);
    }

    #[test]
    fn normalization_modes() {
        assert_eq!(NormalizationChoice::Auto.inter_subject(), NormalizationMode::ZScore);
        assert_eq!(NormalizationChoice::Auto.intra_subject(), NormalizationMode::DbSplScaled);
        assert_eq!(NormalizationChoice::Zscore.intra_subject(), NormalizationMode::ZScore);
        assert_eq!(NormalizationChoice::Dbspl.inter_subject(), NormalizationMode::DbSplScaled);
    }
}
