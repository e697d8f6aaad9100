//! Mapping from signal units to sound pressure level.
//!
//! A calibration is a least-squares line `level_db = slope * log10(rms) + intercept`
//! fitted to `(rms, dbSPL)` pairs. Scaling a recording maps each sample
//! magnitude `|x|` to `10^(level_db(|x|) / 20)`, so that `20 * log10` of the
//! scaled amplitude reads directly in dbSPL.

use serde::{Deserialize, Serialize};

use super::recording::RawRecording;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub slope: f64,
    pub intercept: f64,
    /// False for the fallback mapping used when no meter readings exist.
    pub calibrated: bool,
}

impl Calibration {
    /// Plain `20 * log10(rms)`, i.e. dB relative to one signal unit.
    pub fn uncalibrated() -> Self {
        Calibration {
            slope: 20.0,
            intercept: 0.0,
            calibrated: false,
        }
    }

    pub fn fit(pairs: &[(f64, f64)]) -> Result<Self> {
        if pairs.len() < 2 {
            return Err(Error::DegenerateCalibration(format!(
                "need at least 2 calibration pairs, got {}",
                pairs.len()
            )));
        }
        if let Some(&(rms, _)) = pairs.iter().find(|(rms, _)| !(*rms > 0.0)) {
            return Err(Error::DegenerateCalibration(format!(
                "calibration RMS must be positive, got {rms}"
            )));
        }
        let n = pairs.len() as f64;
        let xs: Vec<f64> = pairs.iter().map(|(rms, _)| rms.log10()).collect();
        let mean_x = xs.iter().sum::<f64>() / n;
        let mean_y = pairs.iter().map(|(_, db)| db).sum::<f64>() / n;
        let mut sxx = 0.0;
        let mut sxy = 0.0;
        for (x, (_, y)) in xs.iter().zip(pairs) {
            sxx += (x - mean_x) * (x - mean_x);
            sxy += (x - mean_x) * (y - mean_y);
        }
        if sxx <= 0.0 {
            return Err(Error::DegenerateCalibration(
                "all calibration abscissae are equal".into(),
            ));
        }
        let slope = sxy / sxx;
        if slope == 0.0 {
            return Err(Error::DegenerateCalibration("fitted slope is zero".into()));
        }
        Ok(Calibration {
            slope,
            intercept: mean_y - slope * mean_x,
            calibrated: true,
        })
    }

    pub fn level_db(&self, rms: f64) -> f64 {
        self.slope * rms.log10() + self.intercept
    }

    /// Inverse of [`Calibration::level_db`].
    pub fn rms_for_level(&self, level_db: f64) -> f64 {
        10f64.powf((level_db - self.intercept) / self.slope)
    }

    pub fn scale_sample(&self, x: f64) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        x.signum() * 10f64.powf(self.level_db(x.abs()) / 20.0)
    }

    pub fn unscale_sample(&self, y: f64) -> f64 {
        if y == 0.0 {
            return 0.0;
        }
        y.signum() * self.rms_for_level(20.0 * y.abs().log10())
    }
}

/// Fit a calibration and apply it to every sample.
///
/// Recordings that are already scaled are first mapped back to signal units.
pub fn scale_to_dbspl(rec: &RawRecording, calibration: &[(f64, f64)]) -> Result<RawRecording> {
    let cal = Calibration::fit(calibration)?;
    Ok(apply_calibration(rec, cal))
}

pub fn apply_calibration(rec: &RawRecording, cal: Calibration) -> RawRecording {
    let base = unscale_recording(rec);
    let samples = base.samples.iter().map(|&x| cal.scale_sample(x)).collect();
    RawRecording {
        samples,
        calibration: Some(cal),
        ..base
    }
}

/// Undo any applied calibration, returning samples in signal units.
pub fn unscale_recording(rec: &RawRecording) -> RawRecording {
    match rec.calibration {
        None => rec.clone(),
        Some(cal) => RawRecording {
            samples: rec.samples.iter().map(|&y| cal.unscale_sample(y)).collect(),
            calibration: None,
            ..rec.clone()
        },
    }
}

pub fn rms(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    (xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64).sqrt()
}
