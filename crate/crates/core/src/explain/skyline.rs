use std::cmp::Ordering;

use super::{ExplainError, Explanation, ExplanationMetrics};

/// `a` is at least as good as `b` on coverage, separation error and
/// conciseness, and strictly better on one of them.
pub fn dominates(a: &ExplanationMetrics, b: &ExplanationMetrics) -> bool {
    let no_worse = a.coverage >= b.coverage
        && a.separation_error <= b.separation_error
        && a.conciseness >= b.conciseness;
    let better = a.coverage > b.coverage
        || a.separation_error < b.separation_error
        || a.conciseness > b.conciseness;
    no_worse && better
}

/// Conciseness desc, coverage desc, separation error asc. No point can be
/// dominated by one sorted after it.
pub(crate) fn presort_order(a: &ExplanationMetrics, b: &ExplanationMetrics) -> Ordering {
    b.conciseness
        .total_cmp(&a.conciseness)
        .then(b.coverage.total_cmp(&a.coverage))
        .then(a.separation_error.total_cmp(&b.separation_error))
}

/// Indices of the non-dominated entries, ascending. Entries with identical
/// metrics are all kept.
pub fn skyline_indices(metrics: &[ExplanationMetrics]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..metrics.len()).collect();
    order.sort_by(|&i, &j| presort_order(&metrics[i], &metrics[j]));
    let mut window: Vec<usize> = Vec::new();
    for i in order {
        if !window.iter().any(|&w| dominates(&metrics[w], &metrics[i])) {
            window.push(i);
        }
    }
    window.sort_unstable();
    window
}

/// Keeps the Pareto-optimal explanations, in input order. Every candidate
/// must carry metrics.
pub fn skyline(candidates: Vec<Explanation>) -> Result<Vec<Explanation>, ExplainError> {
    let metrics = candidates
        .iter()
        .map(|e| e.metrics_or_err().copied())
        .collect::<Result<Vec<_>, _>>()?;
    let keep = skyline_indices(&metrics);
    let mut keep = keep.into_iter().peekable();
    Ok(candidates
        .into_iter()
        .enumerate()
        .filter_map(|(i, e)| {
            if keep.peek() == Some(&i) {
                keep.next();
                Some(e)
            } else {
                None
            }
        })
        .collect())
}
