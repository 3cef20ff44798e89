//! Explaining clusters of tabular data with short predicate conjunctions.
//!
//! The pipeline bins numeric attributes into overlapping intervals, arranges
//! the intervals in a containment taxonomy, turns rows into augmented
//! transactions, mines generalized frequent itemsets per cluster and keeps
//! the Pareto-optimal ones by coverage, separation error and conciseness.
//!
//! ```
//! use cluster_explain::dataset::{ClusterId, Column, Dataset};
//! use cluster_explain::explain::{explain_all, Thresholds};
//! use cluster_explain::transactions::{augment_dataset, NegationConfig};
//! use cluster_explain::{binning::BinningConfig, build_taxonomy};
//!
//! let ages = [22.0, 25.0, 31.0, 58.0, 61.0, 66.0];
//! let labels = [0, 0, 0, 1, 1, 1].map(ClusterId::from).to_vec();
//! let d = Dataset::new(
//!     vec![Column::numeric("age", ages.iter().map(|&a| Some(a)).collect()).unwrap()],
//!     labels,
//!     "cluster",
//! )
//! .unwrap();
//! let taxonomy = build_taxonomy(&d, &BinningConfig::default()).unwrap();
//! let transactions = augment_dataset(&d, &NegationConfig::default());
//! let out = explain_all(&d, &taxonomy, &transactions, &Thresholds::default(), None).unwrap();
//! assert!(!out.clusters[0].explanations.is_empty());
//! ```

pub mod attrsel;
pub mod binning;
pub mod dataset;
pub mod explain;
pub mod gfim;
pub mod taxonomy;
pub mod transactions;

use thiserror::Error;

use binning::{bin_attribute, BinningConfig, BinningError, Interval};
use dataset::{AttrId, ColumnData, Dataset};
use taxonomy::{build_attribute_taxonomy, merge_taxonomies, Taxonomy, TaxonomyError};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Data(#[from] dataset::DataError),
    #[error("binning attribute `{attribute}`: {source}")]
    Binning {
        attribute: String,
        #[source]
        source: BinningError,
    },
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
    #[error(transparent)]
    Mine(#[from] gfim::MineError),
    #[error(transparent)]
    Explain(#[from] explain::ExplainError),
    #[error(transparent)]
    AttrSel(#[from] attrsel::AttrSelError),
}

/// Bins every numeric attribute; see [`bin_attributes`].
pub fn bin_dataset(
    d: &Dataset,
    cfg: &BinningConfig,
) -> Result<Vec<(AttrId, Vec<Interval>)>, Error> {
    bin_attributes(d, &d.attr_ids().collect::<Vec<_>>(), cfg)
}

/// Bins the numeric attributes among `attrs`, with cluster labels
/// supervising tree binning. Attributes with fewer than two distinct values
/// get no intervals and are left out. Output follows column order.
pub fn bin_attributes(
    d: &Dataset,
    attrs: &[AttrId],
    cfg: &BinningConfig,
) -> Result<Vec<(AttrId, Vec<Interval>)>, Error> {
    use rayon::prelude::*;

    cfg.validate().map_err(|source| Error::Binning {
        attribute: String::new(),
        source,
    })?;
    let labels = d.label_codes();
    let mut attrs = attrs.to_vec();
    attrs.sort_unstable();
    attrs.dedup();
    let binned = attrs
        .into_par_iter()
        .filter_map(|attr| match d.column(attr).data() {
            ColumnData::Numeric(values) => Some((attr, values)),
            ColumnData::Categorical { .. } => None,
        })
        .map(|(attr, values)| match bin_attribute(values, labels, cfg) {
            Ok(intervals) if !intervals.is_empty() => Ok(Some((attr, intervals))),
            Ok(_) | Err(BinningError::NoValues | BinningError::Constant(_)) => Ok(None),
            Err(source) => Err(Error::Binning {
                attribute: d.attr_name(attr).to_string(),
                source,
            }),
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(binned.into_iter().flatten().collect())
}

/// One containment taxonomy over all binned attributes.
pub fn taxonomy_from_bins(bins: Vec<(AttrId, Vec<Interval>)>) -> Result<Taxonomy, Error> {
    let subs = bins
        .into_iter()
        .map(|(attr, intervals)| build_attribute_taxonomy(attr, intervals))
        .collect();
    Ok(merge_taxonomies(subs)?)
}

/// [`bin_dataset`] followed by [`taxonomy_from_bins`].
pub fn build_taxonomy(d: &Dataset, cfg: &BinningConfig) -> Result<Taxonomy, Error> {
    taxonomy_from_bins(bin_dataset(d, cfg)?)
}
