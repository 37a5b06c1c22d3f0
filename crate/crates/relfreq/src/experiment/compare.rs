//! Side-by-side comparison of two finished runs.
//!
//! Reordering the same pool towards different targets drives the running
//! mean to different limits; `compare_reports` makes that visible by lining
//! up the report rows of two runs estimator by estimator.

use std::path::Path;

use crate::error::{Error, Result};
use crate::experiment::config::ExperimentConfig;
use crate::experiment::runner::{read_report, EstimatorReport};

/// One estimator present in either run.
#[derive(Debug, Clone)]
pub struct Divergence {
    pub estimator: String,
    pub a: Option<EstimatorReport>,
    pub b: Option<EstimatorReport>,
}

impl Divergence {
    /// Gap between final values, when the estimator ran on both sides.
    pub fn final_gap(&self) -> Option<f64> {
        match (&self.a, &self.b) {
            (Some(a), Some(b)) => Some((a.final_value - b.final_value).abs()),
            _ => None,
        }
    }

    pub fn oracle_gap(&self) -> Option<f64> {
        match (&self.a, &self.b) {
            (Some(a), Some(b)) => Some((a.oracle - b.oracle).abs()),
            _ => None,
        }
    }
}

/// Loads both configs, reads the report each run wrote, and pairs up rows by
/// estimator label. Fails with the missing artifact's path if either run has
/// not completed.
pub fn compare_reports(config_a: &Path, config_b: &Path) -> Result<Vec<Divergence>> {
    let a = load(config_a)?;
    let b = load(config_b)?;
    let mut rows = Vec::new();
    for ra in &a {
        rows.push(Divergence {
            estimator: ra.label.clone(),
            a: Some(ra.clone()),
            b: b.iter().find(|rb| rb.label == ra.label).cloned(),
        });
    }
    for rb in &b {
        if !a.iter().any(|ra| ra.label == rb.label) {
            rows.push(Divergence { estimator: rb.label.clone(), a: None, b: Some(rb.clone()) });
        }
    }
    Ok(rows)
}

fn load(config_path: &Path) -> Result<Vec<EstimatorReport>> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|_| Error::MissingArtifact(config_path.display().to_string()))?;
    let config = ExperimentConfig::from_toml(&text)?;
    read_report(&Path::new(&config.output_dir).join("report.csv"))
}

/// Renders the divergence table.
pub fn render(rows: &[Divergence]) -> String {
    use std::fmt::Write as _;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<24} {:>14} {:>14} {:>14} {:>14} {:>12} {:>12}",
        "estimator", "final_a", "oracle_a", "final_b", "oracle_b", "final_gap", "oracle_gap"
    );
    let cell = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "-".to_string());
    for row in rows {
        let _ = writeln!(
            s,
            "{:<24} {:>14} {:>14} {:>14} {:>14} {:>12} {:>12}",
            row.estimator,
            cell(row.a.as_ref().map(|r| r.final_value)),
            cell(row.a.as_ref().map(|r| r.oracle)),
            cell(row.b.as_ref().map(|r| r.final_value)),
            cell(row.b.as_ref().map(|r| r.oracle)),
            cell(row.final_gap()),
            cell(row.oracle_gap()),
        );
    }
    s
}
