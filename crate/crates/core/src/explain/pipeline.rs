use std::cmp::Ordering;
use std::collections::HashSet;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::skyline::{presort_order, skyline_indices};
use super::{itemset_to_explanation, ExplainError, Explanation, ExplanationMetrics};
use crate::dataset::{AttrId, ClusterId, Dataset};
use crate::gfim::{maxsize_for, mine_in_context, ContextItemset};
use crate::taxonomy::Taxonomy;
use crate::transactions::{Item, Transaction};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Minimum coverage, used as the mining support.
    pub coverage: f64,
    /// Maximum separation error.
    pub separation: f64,
    /// Minimum conciseness; bounds the number of predicates.
    pub conciseness: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            coverage: 0.8,
            separation: 0.3,
            conciseness: 0.2,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<(), ExplainError> {
        let bad = |what: &str, v: f64, range: &str| {
            Err(ExplainError::InvalidThresholds(format!(
                "{what} must lie in {range}, got {v}"
            )))
        };
        if !(self.coverage > 0.0 && self.coverage <= 1.0) {
            return bad("coverage", self.coverage, "(0, 1]");
        }
        if !(0.0..=1.0).contains(&self.separation) {
            return bad("separation", self.separation, "[0, 1]");
        }
        if !(self.conciseness > 0.0 && self.conciseness <= 1.0) {
            return bad("conciseness", self.conciseness, "(0, 1]");
        }
        Ok(())
    }

    pub fn maxsize(&self) -> usize {
        maxsize_for(self.conciseness)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExplainOptions {
    /// Upper bound on candidates entering the skyline per cluster; the best
    /// by QSE are kept.
    pub candidate_cap: usize,
}

impl Default for ExplainOptions {
    fn default() -> Self {
        ExplainOptions {
            candidate_cap: 50_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ClusterExplanations {
    pub cluster: ClusterId,
    /// Skyline, best QSE first.
    pub explanations: Vec<Explanation>,
    /// Itemsets returned by the miner.
    pub mined: usize,
    /// Candidates passing the separation filter.
    pub candidates: usize,
    pub mine_ms: f64,
    pub skyline_ms: f64,
}

#[derive(Clone, Debug, Default)]
pub struct ExplainOutcome {
    /// In [`Dataset::cluster_ids`] order.
    pub clusters: Vec<ClusterExplanations>,
    pub warnings: Vec<String>,
}

impl ExplainOutcome {
    pub fn explanations(&self) -> impl Iterator<Item = &[Explanation]> {
        self.clusters.iter().map(|c| c.explanations.as_slice())
    }
}

/// [`explain_all_with`] with default options.
pub fn explain_all(
    d: &Dataset,
    taxonomy: &Taxonomy,
    transactions: &[Transaction],
    thresholds: &Thresholds,
    attrs: Option<&[AttrId]>,
) -> Result<ExplainOutcome, ExplainError> {
    explain_all_with(
        d,
        taxonomy,
        transactions,
        thresholds,
        attrs,
        &ExplainOptions::default(),
    )
}

/// Pareto-optimal explanations of every cluster.
///
/// `transactions` must hold one transaction per dataset row; metrics are
/// computed against all of them. `attrs` restricts the predicates to the
/// given attributes.
pub fn explain_all_with(
    d: &Dataset,
    taxonomy: &Taxonomy,
    transactions: &[Transaction],
    thresholds: &Thresholds,
    attrs: Option<&[AttrId]>,
    options: &ExplainOptions,
) -> Result<ExplainOutcome, ExplainError> {
    thresholds.validate()?;
    let attrs: Option<HashSet<AttrId>> = attrs.map(|a| a.iter().copied().collect());

    let results: Vec<(ClusterExplanations, Vec<String>)> = (0..d.cluster_ids().len())
        .into_par_iter()
        .map(|c| {
            explain_cluster(
                d,
                taxonomy,
                transactions,
                thresholds,
                attrs.as_ref(),
                options,
                c,
            )
        })
        .collect::<Result<_, _>>()?;

    let mut outcome = ExplainOutcome::default();
    for (cluster, warnings) in results {
        outcome.warnings.extend(warnings);
        outcome.clusters.push(cluster);
    }
    Ok(outcome)
}

struct Candidate {
    items: Vec<Item>,
    metrics: ExplanationMetrics,
}

fn best_first(a: &Candidate, b: &Candidate) -> Ordering {
    b.metrics
        .qse()
        .total_cmp(&a.metrics.qse())
        .then_with(|| presort_order(&a.metrics, &b.metrics))
        .then_with(|| a.items.cmp(&b.items))
}

fn explain_cluster(
    d: &Dataset,
    taxonomy: &Taxonomy,
    transactions: &[Transaction],
    thresholds: &Thresholds,
    attrs: Option<&HashSet<AttrId>>,
    options: &ExplainOptions,
    c: usize,
) -> Result<(ClusterExplanations, Vec<String>), ExplainError> {
    let id = d.cluster_ids()[c].clone();
    let mut warnings = Vec::new();
    let (mined, context): (Vec<&Transaction>, Vec<&Transaction>) =
        transactions.iter().partition(|t| t.cluster as usize == c);

    let started = Instant::now();
    let found: Vec<ContextItemset> = if mined.is_empty() {
        warnings.push(format!("cluster {id}: no transactions"));
        Vec::new()
    } else {
        mine_in_context(
            &mined,
            &context,
            taxonomy,
            attrs,
            thresholds.coverage,
            thresholds.maxsize(),
        )?
    };
    let mine_ms = started.elapsed().as_secs_f64() * 1e3;

    let started = Instant::now();
    let size = mined.len() as f64;
    let mut candidates: Vec<Candidate> = found
        .iter()
        .filter_map(|f| {
            let metrics = ExplanationMetrics {
                coverage: f.mined_count as f64 / size,
                separation_error: (f.total_count - f.mined_count) as f64 / f.total_count as f64,
                conciseness: 1.0 / f.items.len() as f64,
            };
            (metrics.separation_error <= thresholds.separation).then(|| Candidate {
                items: f.items.clone(),
                metrics,
            })
        })
        .collect();
    let n_candidates = candidates.len();
    if candidates.len() > options.candidate_cap {
        // a dominator always sorts before what it dominates, so truncation
        // keeps every dominator of a kept candidate
        candidates.sort_by(best_first);
        candidates.truncate(options.candidate_cap);
        warnings.push(format!(
            "cluster {id}: {n_candidates} candidates, kept the best {} by QSE",
            options.candidate_cap
        ));
    }

    let metrics: Vec<ExplanationMetrics> = candidates.iter().map(|c| c.metrics).collect();
    let mut front: Vec<Candidate> = {
        let keep: HashSet<usize> = skyline_indices(&metrics).into_iter().collect();
        candidates
            .into_iter()
            .enumerate()
            .filter(|(i, _)| keep.contains(i))
            .map(|(_, c)| c)
            .collect()
    };
    front.sort_by(best_first);
    let explanations = front
        .into_iter()
        .map(|cand| {
            let mut e = itemset_to_explanation(&cand.items, id.clone(), d, taxonomy)?;
            e.metrics = Some(cand.metrics);
            Ok(e)
        })
        .collect::<Result<Vec<_>, ExplainError>>()?;
    let skyline_ms = started.elapsed().as_secs_f64() * 1e3;

    if explanations.is_empty() {
        warnings.push(format!("cluster {id}: no explanation meets the thresholds"));
    }
    Ok((
        ClusterExplanations {
            cluster: id,
            explanations,
            mined: found.len(),
            candidates: n_candidates,
            mine_ms,
            skyline_ms,
        },
        warnings,
    ))
}
