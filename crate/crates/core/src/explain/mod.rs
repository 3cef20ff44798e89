//! Cluster explanations: predicate conjunctions, their quality measures, and
//! the per-cluster search that returns the Pareto-optimal ones.

mod pipeline;
pub mod report;
mod skyline;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{ClusterId, Column, ColumnData, DataError, Dataset};
use crate::gfim::MineError;
use crate::taxonomy::Taxonomy;
use crate::transactions::Item;

pub use pipeline::{
    explain_all, explain_all_with, ClusterExplanations, ExplainOptions, ExplainOutcome, Thresholds,
};
pub use skyline::{dominates, skyline, skyline_indices};

#[derive(Debug, Error)]
pub enum ExplainError {
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("an explanation needs at least one predicate")]
    EmptyExplanation,
    #[error("cluster `{0}` has no rows")]
    EmptyCluster(ClusterId),
    #[error("explanation holds for no row; separation error is undefined")]
    NoSupport,
    #[error("explanation for cluster `{0}` has no metrics")]
    MissingMetrics(ClusterId),
    #[error("invalid thresholds: {0}")]
    InvalidThresholds(String),
    #[error("invalid predicate: {0}")]
    InvalidPredicate(String),
    #[error("report schema mismatch: {0}")]
    Schema(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Mine(#[from] MineError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Literal {
    Number(f64),
    Text(String),
}

impl Literal {
    fn as_number(&self) -> Option<f64> {
        match self {
            Literal::Number(v) => Some(*v),
            Literal::Text(s) => s.trim().parse().ok(),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Number(v) => write!(f, "{}", fmt_number(*v)),
            Literal::Text(s) => f.write_str(s),
        }
    }
}

/// Numbers rendered with at most 4 decimals and no trailing zeros.
pub fn fmt_number(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Condition {
    Eq(Literal),
    Neq(Literal),
    /// Closed range, `lo < hi`.
    Between {
        lo: f64,
        hi: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Predicate {
    pub attribute: String,
    pub condition: Condition,
}

impl Predicate {
    pub fn eq(attribute: impl Into<String>, value: Literal) -> Self {
        Predicate {
            attribute: attribute.into(),
            condition: Condition::Eq(value),
        }
    }

    pub fn neq(attribute: impl Into<String>, value: Literal) -> Self {
        Predicate {
            attribute: attribute.into(),
            condition: Condition::Neq(value),
        }
    }

    pub fn between(attribute: impl Into<String>, lo: f64, hi: f64) -> Result<Self, ExplainError> {
        if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
            return Err(ExplainError::InvalidPredicate(format!(
                "between needs lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Predicate {
            attribute: attribute.into(),
            condition: Condition::Between { lo, hi },
        })
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.condition {
            Condition::Eq(v) => write!(f, "{} = {}", self.attribute, v),
            Condition::Neq(v) => write!(f, "{} != {}", self.attribute, v),
            Condition::Between { lo, hi } => write!(
                f,
                "{} between {} and {}",
                self.attribute,
                fmt_number(*lo),
                fmt_number(*hi)
            ),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExplanationMetrics {
    pub coverage: f64,
    pub separation_error: f64,
    pub conciseness: f64,
}

impl ExplanationMetrics {
    /// Mean of coverage, `1 - separation_error` and conciseness.
    pub fn qse(&self) -> f64 {
        (self.coverage + (1.0 - self.separation_error) + self.conciseness) / 3.0
    }
}

/// A conjunction of predicates describing one cluster.
#[derive(Clone, Debug, PartialEq)]
pub struct Explanation {
    pub cluster: ClusterId,
    predicates: Vec<Predicate>,
    pub metrics: Option<ExplanationMetrics>,
}

impl Explanation {
    pub fn new(cluster: ClusterId, predicates: Vec<Predicate>) -> Result<Self, ExplainError> {
        if predicates.is_empty() {
            return Err(ExplainError::EmptyExplanation);
        }
        Ok(Explanation {
            cluster,
            predicates,
            metrics: None,
        })
    }

    pub fn predicates(&self) -> &[Predicate] {
        &self.predicates
    }

    pub fn len(&self) -> usize {
        self.predicates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predicates.is_empty()
    }

    pub fn qse(&self) -> Option<f64> {
        self.metrics.map(|m| m.qse())
    }

    fn metrics_or_err(&self) -> Result<&ExplanationMetrics, ExplainError> {
        self.metrics
            .as_ref()
            .ok_or_else(|| ExplainError::MissingMetrics(self.cluster.clone()))
    }
}

impl fmt::Display for Explanation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.predicates.iter().enumerate() {
            if i > 0 {
                f.write_str(" AND ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// One predicate bound to its column.
enum Bound<'d> {
    /// Holds iff the value is (or, negated, is not) inside `[lo, hi]`.
    Numeric {
        values: &'d [Option<f64>],
        lo: f64,
        hi: f64,
        negate: bool,
    },
    Categorical {
        codes: &'d [Option<u32>],
        accept: Vec<bool>,
    },
}

impl Bound<'_> {
    fn holds(&self, row: usize) -> bool {
        match self {
            Bound::Numeric {
                values,
                lo,
                hi,
                negate,
            } => match values[row] {
                Some(v) => (*lo <= v && v <= *hi) != *negate,
                None => false,
            },
            Bound::Categorical { codes, accept } => codes[row].is_some_and(|c| accept[c as usize]),
        }
    }
}

fn bind<'d>(p: &Predicate, column: &'d Column) -> Bound<'d> {
    match column.data() {
        ColumnData::Numeric(values) => {
            let (lo, hi, negate) = match &p.condition {
                Condition::Eq(lit) | Condition::Neq(lit) => {
                    let v = lit.as_number().unwrap_or(f64::NAN);
                    (v, v, matches!(p.condition, Condition::Neq(_)))
                }
                Condition::Between { lo, hi } => (*lo, *hi, false),
            };
            Bound::Numeric {
                values,
                lo,
                hi,
                negate,
            }
        }
        ColumnData::Categorical { levels, codes } => {
            let accept = levels
                .iter()
                .map(|level| match &p.condition {
                    Condition::Eq(Literal::Text(s)) => level == s,
                    Condition::Neq(Literal::Text(s)) => level != s,
                    Condition::Eq(Literal::Number(v)) => {
                        level.trim().parse::<f64>().ok() == Some(*v)
                    }
                    Condition::Neq(Literal::Number(v)) => {
                        level.trim().parse::<f64>().ok() != Some(*v)
                    }
                    Condition::Between { lo, hi } => level
                        .trim()
                        .parse::<f64>()
                        .is_ok_and(|x| *lo <= x && x <= *hi),
                })
                .collect();
            Bound::Categorical { codes, accept }
        }
    }
}

/// An explanation resolved against a dataset's columns, for repeated
/// evaluation.
pub struct BoundExplanation<'d> {
    parts: Vec<Bound<'d>>,
}

impl<'d> BoundExplanation<'d> {
    pub fn new(e: &Explanation, d: &'d Dataset) -> Result<Self, ExplainError> {
        let parts = e
            .predicates
            .iter()
            .map(|p| {
                let attr = d
                    .attr_by_name(&p.attribute)
                    .ok_or_else(|| ExplainError::UnknownAttribute(p.attribute.clone()))?;
                Ok(bind(p, d.column(attr)))
            })
            .collect::<Result<_, ExplainError>>()?;
        Ok(BoundExplanation { parts })
    }

    /// Every predicate holds; a missing cell fails any predicate on it.
    pub fn holds(&self, row: usize) -> bool {
        self.parts.iter().all(|p| p.holds(row))
    }
}

pub fn holds(e: &Explanation, d: &Dataset, row: usize) -> Result<bool, ExplainError> {
    Ok(BoundExplanation::new(e, d)?.holds(row))
}

/// (rows where `e` holds inside its cluster, rows where it holds overall,
/// cluster size)
fn hit_counts(e: &Explanation, d: &Dataset) -> Result<(usize, usize, usize), ExplainError> {
    let bound = BoundExplanation::new(e, d)?;
    let c = d.cluster_index(&e.cluster)? as u32;
    let labels = d.label_codes();
    let mut inside = 0;
    let mut total = 0;
    for (row, &label) in labels.iter().enumerate() {
        if bound.holds(row) {
            total += 1;
            if label == c {
                inside += 1;
            }
        }
    }
    Ok((inside, total, d.cluster_rows_by_index(c as usize).len()))
}

pub fn coverage(e: &Explanation, d: &Dataset) -> Result<f64, ExplainError> {
    let (inside, _, size) = hit_counts(e, d)?;
    if size == 0 {
        return Err(ExplainError::EmptyCluster(e.cluster.clone()));
    }
    Ok(inside as f64 / size as f64)
}

pub fn separation_error(e: &Explanation, d: &Dataset) -> Result<f64, ExplainError> {
    let (inside, total, _) = hit_counts(e, d)?;
    if total == 0 {
        return Err(ExplainError::NoSupport);
    }
    Ok((total - inside) as f64 / total as f64)
}

pub fn conciseness(e: &Explanation) -> f64 {
    1.0 / e.predicates.len() as f64
}

/// All three measures in one pass over the dataset.
pub fn evaluate(e: &Explanation, d: &Dataset) -> Result<ExplanationMetrics, ExplainError> {
    let (inside, total, size) = hit_counts(e, d)?;
    if size == 0 {
        return Err(ExplainError::EmptyCluster(e.cluster.clone()));
    }
    if total == 0 {
        return Err(ExplainError::NoSupport);
    }
    Ok(ExplanationMetrics {
        coverage: inside as f64 / size as f64,
        separation_error: (total - inside) as f64 / total as f64,
        conciseness: conciseness(e),
    })
}

/// Maps an itemset to predicates: equality items to `=`, negations to `!=`,
/// intervals to `between`.
pub fn itemset_to_explanation(
    items: &[Item],
    cluster: ClusterId,
    d: &Dataset,
    taxonomy: &Taxonomy,
) -> Result<Explanation, ExplainError> {
    let level = |attr, code: u32| -> Literal {
        let (levels, _) = d
            .column(attr)
            .as_categorical()
            .expect("categorical attribute");
        Literal::Text(levels[code as usize].clone())
    };
    let predicates = items
        .iter()
        .map(|item| {
            let name = d.attr_name(item.attr()).to_string();
            Ok(match *item {
                Item::NumericEq { value, .. } => Predicate::eq(name, Literal::Number(value)),
                Item::CatEq { attr, code } => Predicate::eq(name, level(attr, code)),
                Item::CatNeg { attr, code } => Predicate::neq(name, level(attr, code)),
                Item::Interval { node, .. } => {
                    let (_, iv) = taxonomy.interval(node).ok_or_else(|| {
                        ExplainError::InvalidPredicate("interval item points at ALL".into())
                    })?;
                    Predicate::between(name, iv.lo(), iv.hi())?
                }
            })
        })
        .collect::<Result<Vec<_>, ExplainError>>()?;
    Explanation::new(cluster, predicates)
}

pub fn qse(e: &Explanation) -> Result<f64, ExplainError> {
    Ok(e.metrics_or_err()?.qse())
}

/// Mean over clusters of the best explanation's QSE; a cluster without
/// explanations contributes 0.
pub fn qse_aggregate<'a, I>(per_cluster: I) -> Result<f64, ExplainError>
where
    I: IntoIterator<Item = &'a [Explanation]>,
{
    let mut sum = 0.0;
    let mut n = 0usize;
    for exps in per_cluster {
        let mut best = 0.0f64;
        for e in exps {
            best = best.max(qse(e)?);
        }
        sum += best;
        n += 1;
    }
    Ok(if n == 0 { 0.0 } else { sum / n as f64 })
}
