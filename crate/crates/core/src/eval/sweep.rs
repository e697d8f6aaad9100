use serde::{Deserialize, Serialize};

use super::concentration::{
    cluster_concentrations, total_concentration, ClusterConcentration, ConcentrationMetric,
};
use super::rrdm::{cluster_subject_days, rrdm_significance, RrdmResult};
use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::label::ClassLabel;
use crate::seed::{derive, tag};

/// How ties at the observed value enter the ECDF; echoed into reports.
pub const ECDF_TIE_RULE: &str = "samples equal to the observed value count toward the ECDF (<=)";

/// A two-class comparison over a subset of subject-days.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    PreTxVsControl,
    PostTxVsControl,
    PreTxVsPostTx,
}

impl Comparison {
    pub fn name(&self) -> &'static str {
        match self {
            Comparison::PreTxVsControl => "PreTx/Con",
            Comparison::PostTxVsControl => "PostTx/Con",
            Comparison::PreTxVsPostTx => "PreTx/PostTx",
        }
    }

    pub fn labels(&self) -> [ClassLabel; 2] {
        match self {
            Comparison::PreTxVsControl => [ClassLabel::PreTx, ClassLabel::Control],
            Comparison::PostTxVsControl => [ClassLabel::PostTx, ClassLabel::Control],
            Comparison::PreTxVsPostTx => [ClassLabel::PreTx, ClassLabel::PostTx],
        }
    }

    /// Rows and columns whose label belongs to this comparison.
    pub fn subset(&self, dm: &DistanceMatrix) -> DistanceMatrix {
        let keep: Vec<usize> = (0..dm.len())
            .filter(|&i| self.labels().contains(&dm.ids[i].label))
            .collect();
        dm.select(&keep)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub comparison: String,
    pub n: usize,
    pub subject_days: usize,
    pub per_cluster: Vec<ClusterConcentration>,
    pub total_class_conc: f64,
    pub total_subj_conc: f64,
    pub p_value: Option<f64>,
    pub p_display: Option<String>,
    pub trials: usize,
    pub ecdf_ties: String,
}

/// Cluster to `n`, score concentrations, and (when `trials > 0`) run the
/// random-distance significance test.
pub fn concentration_report(
    dm: &DistanceMatrix,
    n: usize,
    trials: usize,
    seed: u64,
    comparison: &str,
) -> Result<(ConcentrationReport, Option<RrdmResult>)> {
    let assignment = cluster_subject_days(dm, n)?;
    let rrdm = if trials > 0 {
        Some(rrdm_significance(dm, n, trials, seed)?)
    } else {
        None
    };
    let report = ConcentrationReport {
        comparison: comparison.to_string(),
        n,
        subject_days: dm.len(),
        per_cluster: cluster_concentrations(&assignment)?,
        total_class_conc: total_concentration(&assignment, ConcentrationMetric::Class)?,
        total_subj_conc: total_concentration(&assignment, ConcentrationMetric::Subject)?,
        p_value: rrdm.as_ref().map(|r| r.p_value),
        p_display: rrdm.as_ref().map(RrdmResult::p_display),
        trials,
        ecdf_ties: ECDF_TIE_RULE.to_string(),
    };
    Ok((report, rrdm))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonPoint {
    pub comparison: String,
    pub total_class_conc: f64,
    pub total_subj_conc: f64,
    pub p_value: Option<f64>,
    pub p_display: Option<String>,
    /// Smallest concentration that would have reached p < 0.01 (resp. 0.05).
    pub threshold_p01: Option<f64>,
    pub threshold_p05: Option<f64>,
    pub rrdm_sd: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub points: Vec<ComparisonPoint>,
    /// `conc(PreTx/Con) - conc(PostTx/Con)` when both comparisons are present.
    pub d: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub trials: usize,
    pub argmax_n: Option<usize>,
    pub smallest_n_near_max: Option<usize>,
    pub half_width: Option<f64>,
    pub near_max_rule: String,
    pub ecdf_ties: String,
}

pub const NEAR_MAX_RULE: &str = "smallest n with d(n) >= max d - 1.96 * sqrt(sd_pre^2 + sd_post^2), \
sd taken from the RRDM samples of both comparisons at argmax n";

fn point_seed(seed: u64, comparison: &str, n: usize) -> u64 {
    derive(seed, "sweep", &[tag(comparison), n as u64])
}

/// Concentrations and significance for every comparison at every `n`.
pub fn sensitivity_sweep(
    sets: &[(Comparison, DistanceMatrix)],
    ns: &[usize],
    trials: usize,
    seed: u64,
) -> Result<SweepResult> {
    if ns.is_empty() {
        return Err(Error::InvalidParameter("sweep needs at least one cluster count".into()));
    }
    if ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("sweep cluster counts must be strictly increasing".into()));
    }
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let mut points = Vec::with_capacity(sets.len());
        for (cmp, dm) in sets {
            let (report, rrdm) = concentration_report(dm, n, trials, point_seed(seed, cmp.name(), n), cmp.name())?;
            points.push(ComparisonPoint {
                comparison: cmp.name().to_string(),
                total_class_conc: report.total_class_conc,
                total_subj_conc: report.total_subj_conc,
                p_value: report.p_value,
                p_display: report.p_display,
                threshold_p01: rrdm.as_ref().and_then(|r| r.threshold(0.01)),
                threshold_p05: rrdm.as_ref().and_then(|r| r.threshold(0.05)),
                rrdm_sd: rrdm.as_ref().map(RrdmResult::sample_sd),
            });
        }
        let find = |c: Comparison| points.iter().find(|p| p.comparison == c.name());
        let d = match (find(Comparison::PreTxVsControl), find(Comparison::PostTxVsControl)) {
            (Some(pre), Some(post)) => Some(pre.total_class_conc - post.total_class_conc),
            _ => None,
        };
        rows.push(SweepRow { n, points, d });
    }

    let mut argmax: Option<(usize, f64)> = None;
    for (i, row) in rows.iter().enumerate() {
        if let Some(d) = row.d {
            if argmax.is_none_or(|(_, best)| d > best) {
                argmax = Some((i, d));
            }
        }
    }
    let (mut half_width, mut smallest) = (None, None);
    if let Some((i, dmax)) = argmax {
        let sd = |c: Comparison| {
            rows[i]
                .points
                .iter()
                .find(|p| p.comparison == c.name())
                .and_then(|p| p.rrdm_sd)
                .unwrap_or(0.0)
        };
        let hw = 1.96 * (sd(Comparison::PreTxVsControl).powi(2) + sd(Comparison::PostTxVsControl).powi(2)).sqrt();
        half_width = Some(hw);
        smallest = rows.iter().find(|r| r.d.is_some_and(|d| d >= dmax - hw)).map(|r| r.n);
    }
    Ok(SweepResult {
        argmax_n: argmax.map(|(i, _)| rows[i].n),
        rows,
        trials,
        smallest_n_near_max: smallest,
        half_width,
        near_max_rule: NEAR_MAX_RULE.to_string(),
        ecdf_ties: ECDF_TIE_RULE.to_string(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntraSubjectRow {
    pub subject: String,
    pub pre_days: usize,
    pub post_days: usize,
    pub report: ConcentrationReport,
}

/// Per subject with both PreTx and PostTx days: cluster only that
/// subject's days into `n` clusters and score them.
pub fn intra_subject_compare(dm: &DistanceMatrix, n: usize, trials: usize, seed: u64) -> Result<Vec<IntraSubjectRow>> {
    let mut subjects: Vec<&str> = dm.ids.iter().map(|id| id.subject.as_str()).collect();
    subjects.sort_unstable();
    subjects.dedup();
    let mut rows = Vec::new();
    for subject in subjects {
        let idx: Vec<usize> = (0..dm.len())
            .filter(|&i| {
                dm.ids[i].subject == subject && matches!(dm.ids[i].label, ClassLabel::PreTx | ClassLabel::PostTx)
            })
            .collect();
        let pre = idx.iter().filter(|&&i| dm.ids[i].label == ClassLabel::PreTx).count();
        let post = idx.len() - pre;
        if pre == 0 || post == 0 {
            continue;
        }
        if idx.len() < n.max(3) {
            return Err(Error::InvalidParameter(format!(
                "subject {subject} has {} PreTx/PostTx days; at least {} are needed",
                idx.len(),
                n.max(3)
            )));
        }
        let sub = dm.select(&idx);
        let s = derive(seed, "intra", &[tag(subject)]);
        let (report, _) = concentration_report(&sub, n, trials, s, Comparison::PreTxVsPostTx.name())?;
        rows.push(IntraSubjectRow {
            subject: subject.to_string(),
            pre_days: pre,
            post_days: post,
            report,
        });
    }
    Ok(rows)
}
