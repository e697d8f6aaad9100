use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use super::concentration::ClusterAssignment;
use super::rrdm::RrdmResult;
use super::sweep::{ConcentrationReport, SweepResult};
use crate::error::{Error, Result};

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// One row per nonempty cluster, then a totals row with an empty cluster field.
pub fn concentration_csv(reports: &[ConcentrationReport]) -> String {
    let mut out = String::from(
        "comparison,n,cluster,size,class_concentration,subject_concentration,dominant_label,p_value\n",
    );
    for r in reports {
        for c in &r.per_cluster {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},",
                r.comparison, r.n, c.cluster, c.size, c.class_concentration, c.subject_concentration, c.dominant_label
            );
        }
        let _ = writeln!(
            out,
            "{},{},,{},{},{},,{}",
            r.comparison,
            r.n,
            r.subject_days,
            r.total_class_conc,
            r.total_subj_conc,
            r.p_display.clone().unwrap_or_default()
        );
    }
    out
}

pub fn sweep_csv(sweep: &SweepResult) -> String {
    let mut out = String::from("n,comparison,total_class_conc,total_subj_conc,p_value,threshold_p01,threshold_p05,d\n");
    for row in &sweep.rows {
        for p in &row.points {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                row.n,
                p.comparison,
                p.total_class_conc,
                p.total_subj_conc,
                p.p_display.clone().unwrap_or_default(),
                opt(p.threshold_p01),
                opt(p.threshold_p05),
                opt(row.d)
            );
        }
    }
    out
}

/// Sorted RRDM samples with their ECDF values.
pub fn ecdf_csv(rrdm: &RrdmResult) -> String {
    let sorted = rrdm.sorted_samples();
    let t = sorted.len() as f64;
    let mut out = format!("# observed={}\nrank,concentration,ecdf\n", rrdm.observed);
    for (i, s) in sorted.iter().enumerate() {
        let below = sorted.partition_point(|&x| x <= *s);
        let _ = writeln!(out, "{},{},{}", i + 1, s, below as f64 / t);
    }
    out
}

/// Cluster by class count table.
pub fn heatmap_csv(assignment: &ClusterAssignment) -> String {
    let mut labels: Vec<&str> = assignment.ids.iter().map(|id| id.label.as_str()).collect();
    labels.sort_unstable();
    labels.dedup();
    let mut out = format!("cluster,{}\n", labels.join(","));
    for (c, members) in assignment.members().iter().enumerate() {
        let counts: Vec<String> = labels
            .iter()
            .map(|l| members.iter().filter(|m| m.label.as_str() == *l).count().to_string())
            .collect();
        let _ = writeln!(out, "{c},{}", counts.join(","));
    }
    out
}

/// Subject-day to cluster table.
pub fn assignment_csv(assignment: &ClusterAssignment) -> String {
    let mut out = String::from("subject,day,label,cluster\n");
    for (id, c) in assignment.ids.iter().zip(&assignment.clusters) {
        let _ = writeln!(out, "{},{},{},{c}", id.subject, id.day, id.label);
    }
    out
}
