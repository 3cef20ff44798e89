//! The eval command: recompute every metric of a stored report against the
//! data and compare.

use std::collections::HashMap;
use std::path::Path;

use serde::Serialize;

use cluster_explain::dataset::{load_csv, AttributeKind, ClusterId};
use cluster_explain::explain::report::Report;
use cluster_explain::explain::{evaluate, ExplainError};

use crate::error::CliError;

/// Stored and recomputed values may differ by this much.
pub const DRIFT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalCluster {
    pub cluster: String,
    pub explanations: usize,
    /// Best recomputed QSE; `None` without a valid explanation.
    pub best_qse: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Drift {
    pub cluster: String,
    /// Position within the cluster's list.
    pub explanation: usize,
    pub field: String,
    pub stored: f64,
    /// `None` when the explanation holds for no row.
    pub recomputed: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    /// Every cluster of the data, in data order.
    pub clusters: Vec<EvalCluster>,
    /// Mean over clusters of the best QSE, 0 for clusters without one.
    pub aggregate_qse: f64,
    pub drift: Vec<Drift>,
}

/// Loads `data` and re-evaluates the report at `report_path`. The label
/// column and column kinds default to those recorded in the report.
pub fn run_eval(
    data: &Path,
    labels: Option<&str>,
    report_path: &Path,
) -> Result<EvalReport, CliError> {
    let text = std::fs::read_to_string(report_path).map_err(|e| CliError::io(report_path, e))?;
    let report: Report = serde_json::from_str(&text)?;

    let recorded_labels = report.config.get("labels").and_then(|v| v.as_str());
    let labels = labels.or(recorded_labels).unwrap_or("cluster");
    let hints: HashMap<String, AttributeKind> = report
        .config
        .get("column_kinds")
        .map(|v| serde_json::from_value(v.clone()))
        .transpose()?
        .unwrap_or_default();
    let d = load_csv(data, labels, &hints)?;
    evaluate_report(&report, &d)
}

pub fn evaluate_report(
    report: &Report,
    d: &cluster_explain::dataset::Dataset,
) -> Result<EvalReport, CliError> {
    let mut best: HashMap<ClusterId, (usize, Option<f64>)> = HashMap::new();
    let mut drift = Vec::new();
    for c in &report.clusters {
        let id = c.cluster_id()?;
        d.cluster_index(&id)?;
        let entry = best.entry(id.clone()).or_insert((0, None));
        for (i, rec) in c.explanations.iter().enumerate() {
            entry.0 += 1;
            let e = rec.to_explanation(id.clone())?;
            let stored = [
                ("coverage", rec.coverage),
                ("separation_error", rec.separation_error),
                ("conciseness", rec.conciseness),
                ("qse", rec.qse),
            ];
            match evaluate(&e, d) {
                Ok(m) => {
                    let fresh = [m.coverage, m.separation_error, m.conciseness, m.qse()];
                    for ((field, s), f) in stored.iter().zip(fresh) {
                        if (s - f).abs() > DRIFT_TOLERANCE || (s - f).is_nan() {
                            drift.push(Drift {
                                cluster: id.to_string(),
                                explanation: i,
                                field: field.to_string(),
                                stored: *s,
                                recomputed: Some(f),
                            });
                        }
                    }
                    entry.1 = Some(entry.1.map_or(m.qse(), |b: f64| b.max(m.qse())));
                }
                Err(ExplainError::NoSupport) => drift.push(Drift {
                    cluster: id.to_string(),
                    explanation: i,
                    field: "separation_error".into(),
                    stored: rec.separation_error,
                    recomputed: None,
                }),
                Err(e) => return Err(e.into()),
            }
        }
    }

    let clusters: Vec<EvalCluster> = d
        .cluster_ids()
        .iter()
        .map(|id| {
            let (n, q) = best.get(id).copied().unwrap_or((0, None));
            EvalCluster {
                cluster: id.to_string(),
                explanations: n,
                best_qse: q,
            }
        })
        .collect();
    let aggregate_qse = clusters
        .iter()
        .map(|c| c.best_qse.unwrap_or(0.0))
        .sum::<f64>()
        / clusters.len() as f64;
    Ok(EvalReport {
        clusters,
        aggregate_qse,
        drift,
    })
}
