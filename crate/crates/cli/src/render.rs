//! Human-readable reports. Metrics are rounded to two decimals.

use std::fmt::Write;

use cluster_explain::dataset::Dataset;
use cluster_explain::explain::report::{ExplanationRecord, Report};
use cluster_explain::explain::Predicate;

use crate::eval::EvalReport;

fn sentence(e: &ExplanationRecord) -> String {
    let preds: Vec<String> = e
        .predicates
        .iter()
        .map(|p| {
            Predicate::try_from(p)
                .map(|p| p.to_string())
                .unwrap_or_else(|_| format!("{p:?}"))
        })
        .collect();
    format!(
        "{:.0}% of the cluster's points hold: {}",
        e.coverage * 100.0,
        preds.join(" AND ")
    )
}

pub fn explain_text(report: &Report, d: &Dataset) -> String {
    let mut out = String::new();
    if let Some(sel) = &report.selected_attributes {
        let _ = writeln!(out, "Selected attributes: {}", sel.join(", "));
    }
    let mut best_sum = 0.0;
    for c in &report.clusters {
        let size = c
            .cluster_id()
            .ok()
            .and_then(|id| d.cluster_rows(&id).ok())
            .map_or(0, <[usize]>::len);
        let label = match &c.cluster {
            serde_json::Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        let _ = writeln!(out, "\nCluster {label} ({size} points)");
        match c.explanations.first() {
            None => {
                let _ = writeln!(out, "  no explanation meets the thresholds");
            }
            Some(best) => {
                best_sum += best.qse;
                let _ = writeln!(out, "  {}", sentence(best));
                let _ = writeln!(
                    out,
                    "  separation error {:.2}, conciseness {:.2}, QSE {:.2}",
                    best.separation_error, best.conciseness, best.qse
                );
                for other in &c.explanations[1..] {
                    let _ = writeln!(out, "  also: {} (QSE {:.2})", sentence(other), other.qse);
                }
            }
        }
    }
    if !report.clusters.is_empty() {
        let _ = writeln!(out, "\nQSE: {:.2}", best_sum / report.clusters.len() as f64);
    }
    out
}

pub fn eval_text(r: &EvalReport) -> String {
    let mut out = String::new();
    for c in &r.clusters {
        match c.best_qse {
            Some(q) => {
                let _ = writeln!(
                    out,
                    "Cluster {}: {} explanations, best QSE {:.2}",
                    c.cluster, c.explanations, q
                );
            }
            None => {
                let _ = writeln!(out, "Cluster {}: no explanation", c.cluster);
            }
        }
    }
    let _ = writeln!(
        out,
        "QSE: {:.2} over {} clusters",
        r.aggregate_qse,
        r.clusters.len()
    );
    if r.drift.is_empty() {
        let _ = writeln!(out, "Drift: none");
    } else {
        let _ = writeln!(
            out,
            "Drift: {} stored values differ from recomputed ones",
            r.drift.len()
        );
        for d in &r.drift {
            let recomputed = d
                .recomputed
                .map_or("undefined".to_string(), |v| format!("{v:.6}"));
            let _ = writeln!(
                out,
                "  cluster {} explanation {} {}: stored {:.6}, recomputed {}",
                d.cluster, d.explanation, d.field, d.stored, recomputed
            );
        }
    }
    out
}
