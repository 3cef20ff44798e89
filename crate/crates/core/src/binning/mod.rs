//! Candidate intervals for numeric attributes.
//!
//! Each binning method maps a column to a list of closed intervals
//! `[lo, hi]` with `lo < hi`. [`bin_attribute`] unions the configured
//! methods and injects the spanning interval that later becomes the root of
//! the attribute's taxonomy.

mod kmeans1d;
mod tree;

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use kmeans1d::{bin_kmeans_1d, optimal_partition, sse_of_groups};
pub use tree::bin_tree_based;

#[derive(Debug, Error, PartialEq)]
pub enum BinningError {
    #[error("no non-missing values")]
    NoValues,
    #[error("all values are identical ({0})")]
    Constant(f64),
    #[error("k = {k} exceeds the {distinct} distinct values")]
    TooManyBins { k: usize, distinct: usize },
    #[error("bin count must be positive")]
    ZeroBins,
    #[error("{values} values but {labels} labels")]
    LengthMismatch { values: usize, labels: usize },
    #[error("invalid interval [{lo}, {hi}]: lo must be < hi")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("invalid binning config: {0}")]
    InvalidConfig(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BinMethod {
    EqualWidth,
    EqualFrequency,
    KMeans1D,
    TreeBased,
    /// The injected `[min lo, max hi]` interval.
    Span,
}

impl BinMethod {
    pub fn short_name(self) -> &'static str {
        match self {
            BinMethod::EqualWidth => "ew",
            BinMethod::EqualFrequency => "ef",
            BinMethod::KMeans1D => "km",
            BinMethod::TreeBased => "tree",
            BinMethod::Span => "span",
        }
    }

    pub fn from_short_name(s: &str) -> Option<Self> {
        match s {
            "ew" | "equal-width" => Some(BinMethod::EqualWidth),
            "ef" | "equal-frequency" => Some(BinMethod::EqualFrequency),
            "km" | "kmeans" => Some(BinMethod::KMeans1D),
            "tree" => Some(BinMethod::TreeBased),
            _ => None,
        }
    }
}

/// Closed interval `[lo, hi]`, `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
    source: BinMethod,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, source: BinMethod) -> Result<Self, BinningError> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(BinningError::InvalidInterval { lo, hi });
        }
        Ok(Interval { lo, hi, source })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn source(&self) -> BinMethod {
        self.source
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn same_range(&self, other: &Interval) -> bool {
        self.lo == other.lo && self.hi == other.hi
    }

    /// Order by `lo` ascending, then `hi` descending (containers first).
    pub fn cmp_range(&self, other: &Interval) -> Ordering {
        self.lo
            .total_cmp(&other.lo)
            .then_with(|| other.hi.total_cmp(&self.hi))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinningConfig {
    pub methods: Vec<BinMethod>,
    pub bins_per_method: usize,
    pub tree_max_leaves: usize,
}

impl Default for BinningConfig {
    fn default() -> Self {
        BinningConfig {
            methods: vec![
                BinMethod::EqualWidth,
                BinMethod::EqualFrequency,
                BinMethod::KMeans1D,
                BinMethod::TreeBased,
            ],
            bins_per_method: 5,
            tree_max_leaves: 8,
        }
    }
}

impl BinningConfig {
    pub fn validate(&self) -> Result<(), BinningError> {
        if self.methods.is_empty() {
            return Err(BinningError::InvalidConfig("no binning methods".into()));
        }
        if self.methods.contains(&BinMethod::Span) {
            return Err(BinningError::InvalidConfig(
                "`span` is injected automatically and cannot be configured".into(),
            ));
        }
        if self.bins_per_method < 2 {
            return Err(BinningError::InvalidConfig(
                "bins_per_method must be >= 2".into(),
            ));
        }
        if self.tree_max_leaves < 2 {
            return Err(BinningError::InvalidConfig(
                "tree_max_leaves must be >= 2".into(),
            ));
        }
        Ok(())
    }
}

fn min_max(values: &[f64]) -> Result<(f64, f64), BinningError> {
    let mut it = values.iter().copied().filter(|v| v.is_finite());
    let first = it.next().ok_or(BinningError::NoValues)?;
    let (lo, hi) = it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if lo == hi {
        return Err(BinningError::Constant(lo));
    }
    Ok((lo, hi))
}

fn sorted_finite(values: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Intervals from a sorted list of boundaries; repeated boundaries collapse.
fn intervals_from_edges(edges: &[f64], source: BinMethod) -> Vec<Interval> {
    let mut out = Vec::new();
    let mut dedup: Vec<f64> = edges.to_vec();
    dedup.dedup();
    for w in dedup.windows(2) {
        if let Ok(iv) = Interval::new(w[0], w[1], source) {
            out.push(iv);
        }
    }
    out
}

/// `k` equal-width intervals over `[min, max]`.
pub fn bin_equal_width(values: &[f64], k: usize) -> Result<Vec<Interval>, BinningError> {
    if k == 0 {
        return Err(BinningError::ZeroBins);
    }
    let (lo, hi) = min_max(values)?;
    let width = hi - lo;
    let edges: Vec<f64> = (0..=k)
        .map(|j| {
            if j == k {
                hi
            } else {
                lo + width * j as f64 / k as f64
            }
        })
        .collect();
    Ok(intervals_from_edges(&edges, BinMethod::EqualWidth))
}

/// Quantile boundaries using the inverse empirical CDF: the `j/k` boundary
/// is the `ceil(j·n/k)`-th smallest value (1-based).
pub fn bin_equal_frequency(values: &[f64], k: usize) -> Result<Vec<Interval>, BinningError> {
    if k == 0 {
        return Err(BinningError::ZeroBins);
    }
    min_max(values)?;
    let sorted = sorted_finite(values);
    let n = sorted.len();
    let mut edges = Vec::with_capacity(k + 1);
    edges.push(sorted[0]);
    for j in 1..k {
        let rank = (j * n).div_ceil(k);
        edges.push(sorted[rank.max(1) - 1]);
    }
    edges.push(sorted[n - 1]);
    Ok(intervals_from_edges(&edges, BinMethod::EqualFrequency))
}

/// Endpoints rounded to 9 significant digits, used as the dedup key.
fn rounded_key(iv: &Interval) -> (u64, u64) {
    fn round9(x: f64) -> u64 {
        let r: f64 = format!("{x:.8e}").parse().unwrap_or(x);
        (r + 0.0).to_bits()
    }
    (round9(iv.lo), round9(iv.hi))
}

/// Union of all configured methods' intervals over the non-missing values
/// of one attribute, deduplicated, plus the spanning interval.
///
/// `labels` holds the cluster position of each row (aligned with `values`);
/// only the tree-based method reads it. Methods that fail on this column are
/// skipped. The result is sorted containers-first.
pub fn bin_attribute(
    values: &[Option<f64>],
    labels: &[u32],
    cfg: &BinningConfig,
) -> Result<Vec<Interval>, BinningError> {
    cfg.validate()?;
    if values.len() != labels.len() {
        return Err(BinningError::LengthMismatch {
            values: values.len(),
            labels: labels.len(),
        });
    }
    let (present, present_labels): (Vec<f64>, Vec<u32>) = values
        .iter()
        .zip(labels)
        .filter_map(|(v, &l)| v.map(|v| (v, l)))
        .unzip();

    let mut all = Vec::new();
    for &method in &cfg.methods {
        let res = match method {
            BinMethod::EqualWidth => bin_equal_width(&present, cfg.bins_per_method),
            BinMethod::EqualFrequency => bin_equal_frequency(&present, cfg.bins_per_method),
            BinMethod::KMeans1D => {
                let distinct = distinct_count(&present);
                bin_kmeans_1d(&present, cfg.bins_per_method.min(distinct.max(1)))
            }
            BinMethod::TreeBased => bin_tree_based(&present, &present_labels, cfg.tree_max_leaves),
            BinMethod::Span => unreachable!("rejected by validate"),
        };
        match res {
            Ok(ivs) => all.extend(ivs),
            Err(e) => log::debug!("{method:?} binning skipped: {e}"),
        }
    }
    if all.is_empty() {
        return Ok(all);
    }

    let lo = all.iter().map(Interval::lo).fold(f64::INFINITY, f64::min);
    let hi = all
        .iter()
        .map(Interval::hi)
        .fold(f64::NEG_INFINITY, f64::max);
    let span = Interval::new(lo, hi, BinMethod::Span)?;

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for iv in all.into_iter().chain(std::iter::once(span)) {
        if seen.insert(rounded_key(&iv)) {
            out.push(iv);
        }
    }
    out.sort_by(Interval::cmp_range);
    Ok(out)
}

fn distinct_count(values: &[f64]) -> usize {
    let mut s = sorted_finite(values);
    s.dedup();
    s.len()
}
