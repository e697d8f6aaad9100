//! Grouping subject-days by a distance matrix and scoring how well the
//! groups line up with class labels.

mod concentration;
mod report;
mod rrdm;
mod sweep;

pub use concentration::{
    class_concentration, cluster_concentrations, subject_concentration, total_concentration,
    ClusterAssignment, ClusterConcentration, ConcentrationMetric,
};
pub use report::{
    assignment_csv, concentration_csv, ecdf_csv, heatmap_csv, sweep_csv, write_json, write_text,
};
pub use rrdm::{cluster_subject_days, ecdf_p_value, random_distance_matrix, rrdm_significance, RrdmResult};
pub use sweep::{
    concentration_report, intra_subject_compare, sensitivity_sweep, Comparison, ComparisonPoint,
    ConcentrationReport, IntraSubjectRow, SweepResult, SweepRow, ECDF_TIE_RULE, NEAR_MAX_RULE,
};
