use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::{ClassLabel, SubjectDay};

/// Subject-days grouped into `n` clusters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub n: usize,
    pub ids: Vec<SubjectDay>,
    /// Cluster index of each id, in `0..n`.
    pub clusters: Vec<usize>,
}

impl ClusterAssignment {
    pub fn new(ids: Vec<SubjectDay>, clusters: Vec<usize>, n: usize) -> Result<Self> {
        if ids.len() != clusters.len() {
            return Err(Error::LengthMismatch {
                expected: ids.len(),
                got: clusters.len(),
            });
        }
        if let Some(&bad) = clusters.iter().find(|&&c| c >= n) {
            return Err(Error::InvalidParameter(format!("cluster index {bad} outside 0..{n}")));
        }
        Ok(ClusterAssignment { n, ids, clusters })
    }

    /// Members of each cluster, in id order. Clusters may be empty.
    pub fn members(&self) -> Vec<Vec<&SubjectDay>> {
        let mut out = vec![Vec::new(); self.n];
        for (id, &c) in self.ids.iter().zip(&self.clusters) {
            out[c].push(id);
        }
        out
    }
}

fn dominant(counts: &BTreeMap<&'static str, usize>) -> (&'static str, usize) {
    // BTreeMap iterates in name order, so ties resolve to the first name.
    counts
        .iter()
        .fold(("", 0), |best, (&k, &v)| if v > best.1 { (k, v) } else { best })
}

fn label_counts<'a>(labels: impl Iterator<Item = ClassLabel> + 'a) -> BTreeMap<&'static str, usize> {
    let mut counts = BTreeMap::new();
    for l in labels {
        *counts.entry(l.as_str()).or_insert(0) += 1;
    }
    counts
}

/// Fraction of the cluster's subject-days carrying the dominant label.
pub fn class_concentration(members: &[&SubjectDay]) -> Result<f64> {
    if members.is_empty() {
        return Err(Error::EmptyInput("class concentration of an empty cluster"));
    }
    let counts = label_counts(members.iter().map(|m| m.label));
    Ok(dominant(&counts).1 as f64 / members.len() as f64)
}

/// As [`class_concentration`] but each (subject, label) pair counts once.
pub fn subject_concentration(members: &[&SubjectDay]) -> Result<f64> {
    if members.is_empty() {
        return Err(Error::EmptyInput("subject concentration of an empty cluster"));
    }
    let mut unique: Vec<(&str, ClassLabel)> = members.iter().map(|m| (m.subject.as_str(), m.label)).collect();
    unique.sort_by(|a, b| a.0.cmp(b.0).then(a.1.as_str().cmp(b.1.as_str())));
    unique.dedup();
    let counts = label_counts(unique.iter().map(|u| u.1));
    Ok(dominant(&counts).1 as f64 / unique.len() as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConcentrationMetric {
    Class,
    Subject,
}

/// `sum_i h_i |c_i| / Q` over nonempty clusters.
pub fn total_concentration(assignment: &ClusterAssignment, metric: ConcentrationMetric) -> Result<f64> {
    let q = assignment.ids.len();
    if q == 0 {
        return Err(Error::EmptyInput("total concentration of an empty clustering"));
    }
    let mut total = 0.0;
    for members in assignment.members().iter().filter(|m| !m.is_empty()) {
        let h = match metric {
            ConcentrationMetric::Class => class_concentration(members)?,
            ConcentrationMetric::Subject => subject_concentration(members)?,
        };
        total += h * members.len() as f64;
    }
    Ok(total / q as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterConcentration {
    pub cluster: usize,
    pub size: usize,
    pub class_concentration: f64,
    pub subject_concentration: f64,
    pub dominant_label: String,
    pub label_counts: BTreeMap<String, usize>,
}

/// Per-cluster rows for nonempty clusters.
pub fn cluster_concentrations(assignment: &ClusterAssignment) -> Result<Vec<ClusterConcentration>> {
    assignment
        .members()
        .iter()
        .enumerate()
        .filter(|(_, m)| !m.is_empty())
        .map(|(c, m)| {
            let counts = label_counts(m.iter().map(|x| x.label));
            Ok(ClusterConcentration {
                cluster: c,
                size: m.len(),
                class_concentration: class_concentration(m)?,
                subject_concentration: subject_concentration(m)?,
                dominant_label: dominant(&counts).0.to_string(),
                label_counts: counts.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            })
        })
        .collect()
}
