//! Rows as augmented transactions: one equality item per present cell plus
//! value-negation items for categorical attributes.

use std::cmp::Ordering;
use std::hash::{Hash, Hasher};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{AttrId, ColumnData, Dataset};
use crate::taxonomy::NodeId;

/// A transaction atom.
///
/// Categorical values are level codes of the owning column; interval items
/// point at a taxonomy node and never occur in a raw transaction.
#[derive(Clone, Copy, Debug)]
pub enum Item {
    NumericEq { attr: AttrId, value: f64 },
    CatEq { attr: AttrId, code: u32 },
    CatNeg { attr: AttrId, code: u32 },
    Interval { attr: AttrId, node: NodeId },
}

impl Item {
    pub fn attr(&self) -> AttrId {
        match *self {
            Item::NumericEq { attr, .. }
            | Item::CatEq { attr, .. }
            | Item::CatNeg { attr, .. }
            | Item::Interval { attr, .. } => attr,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Item::NumericEq { .. } | Item::CatEq { .. } => 0,
            Item::Interval { .. } => 1,
            Item::CatNeg { .. } => 2,
        }
    }

    fn payload_bits(&self) -> u64 {
        match *self {
            Item::NumericEq { value, .. } => (value + 0.0).to_bits(),
            Item::CatEq { code, .. } | Item::CatNeg { code, .. } => u64::from(code),
            Item::Interval { node, .. } => u64::from(node.0),
        }
    }
}

impl PartialEq for Item {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Item {}

impl Hash for Item {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.attr().hash(state);
        self.rank().hash(state);
        std::mem::discriminant(self).hash(state);
        self.payload_bits().hash(state);
    }
}

impl Ord for Item {
    /// Attribute, then equality items, intervals, negations.
    fn cmp(&self, other: &Self) -> Ordering {
        self.attr()
            .cmp(&other.attr())
            .then_with(|| self.rank().cmp(&other.rank()))
            .then_with(|| match (self, other) {
                (Item::NumericEq { value: a, .. }, Item::NumericEq { value: b, .. }) => {
                    (a + 0.0).total_cmp(&(b + 0.0))
                }
                (Item::NumericEq { .. }, Item::CatEq { .. }) => Ordering::Less,
                (Item::CatEq { .. }, Item::NumericEq { .. }) => Ordering::Greater,
                _ => self.payload_bits().cmp(&other.payload_bits()),
            })
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transaction {
    pub row: usize,
    /// Cluster position into [`Dataset::cluster_ids`].
    pub cluster: u32,
    /// Sorted by [`Item`]'s ordering.
    pub items: Vec<Item>,
}

impl Transaction {
    pub fn contains(&self, item: &Item) -> bool {
        self.items.binary_search(item).is_ok()
    }

    /// The raw numeric value of `attr`, if present.
    pub fn numeric_value(&self, attr: AttrId) -> Option<f64> {
        let start = self.items.partition_point(|i| i.attr() < attr);
        self.items[start..]
            .iter()
            .take_while(|i| i.attr() == attr)
            .find_map(|i| match i {
                Item::NumericEq { value, .. } => Some(*value),
                _ => None,
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NegationConfig {
    /// Attributes with more distinct values than this only negate their
    /// `max_neg_cardinality` most frequent values.
    pub max_neg_cardinality: usize,
}

impl Default for NegationConfig {
    fn default() -> Self {
        NegationConfig {
            max_neg_cardinality: 20,
        }
    }
}

/// Level codes eligible for negation items in one categorical column,
/// ascending by code.
pub fn negation_levels(levels: &[String], codes: &[Option<u32>], cfg: &NegationConfig) -> Vec<u32> {
    let mut freq = vec![0usize; levels.len()];
    for c in codes.iter().flatten() {
        freq[*c as usize] += 1;
    }
    let mut present: Vec<u32> = (0..levels.len() as u32)
        .filter(|&c| freq[c as usize] > 0)
        .collect();
    if present.len() > cfg.max_neg_cardinality {
        // most frequent first; ties by level order
        present.sort_by(|&a, &b| freq[b as usize].cmp(&freq[a as usize]).then(a.cmp(&b)));
        present.truncate(cfg.max_neg_cardinality);
        present.sort_unstable();
    }
    present
}

/// One augmented transaction per row, in row order.
pub fn augment_dataset(d: &Dataset, cfg: &NegationConfig) -> Vec<Transaction> {
    let negs: Vec<Vec<u32>> = d
        .columns()
        .iter()
        .map(|col| match col.data() {
            ColumnData::Categorical { levels, codes } => negation_levels(levels, codes, cfg),
            ColumnData::Numeric(_) => Vec::new(),
        })
        .collect();
    let labels = d.label_codes();
    (0..d.n_rows())
        .into_par_iter()
        .map(|row| {
            let mut items = Vec::new();
            for (i, col) in d.columns().iter().enumerate() {
                let attr = AttrId::from(i);
                match col.data() {
                    ColumnData::Numeric(values) => {
                        if let Some(value) = values[row] {
                            items.push(Item::NumericEq { attr, value });
                        }
                    }
                    ColumnData::Categorical { codes, .. } => {
                        if let Some(code) = codes[row] {
                            items.push(Item::CatEq { attr, code });
                            items.extend(
                                negs[i]
                                    .iter()
                                    .filter(|&&v| v != code)
                                    .map(|&v| Item::CatNeg { attr, code: v }),
                            );
                        }
                    }
                }
            }
            items.sort_unstable();
            Transaction {
                row,
                cluster: labels[row],
                items,
            }
        })
        .collect()
}
