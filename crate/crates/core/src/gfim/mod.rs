//! Generalized frequent itemset mining over augmented transactions and the
//! interval taxonomy.
//!
//! An interval item is supported by a transaction holding a numeric value of
//! the same attribute inside the interval. Itemsets obey two structural
//! rules on top of support and size:
//!
//! * per attribute, at most one equality-or-interval item; several negations
//!   of one categorical attribute may co-occur, but never with its equality
//!   item;
//! * no item appears together with one of its taxonomy ancestors. With an
//!   interval taxonomy this is implied by the first rule, since ancestors
//!   always share the attribute.
//!
//! Supports are counted on per-item row bitsets; transactions are never
//! physically extended with ancestors.

mod category;
mod engine;
mod rowset;

use std::borrow::Borrow;
use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

pub use category::{mine_with_categories, CategoryTaxonomy, SymbolItemset};
pub use rowset::RowSet;

use crate::dataset::AttrId;
use crate::taxonomy::Taxonomy;
use crate::transactions::{Item, Transaction};
use engine::{Found, Search, Universe};

#[derive(Debug, Error, PartialEq)]
pub enum MineError {
    #[error("no transactions to mine")]
    EmptyTransactions,
    #[error("minsup must lie in (0, 1], got {0}")]
    InvalidMinsup(f64),
    #[error("maxsize must be at least 1")]
    InvalidMaxsize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedItemset {
    /// Sorted by [`Item`]'s ordering.
    pub items: Vec<Item>,
    pub count: usize,
    pub support: f64,
}

/// Whether `t` supports `item`, directly or through interval containment.
pub fn item_supported_by(item: &Item, t: &Transaction, taxonomy: &Taxonomy) -> bool {
    match item {
        Item::Interval { attr, node } => match (taxonomy.interval(*node), t.numeric_value(*attr)) {
            (Some((a, iv)), Some(v)) => a == *attr && iv.contains(v),
            _ => false,
        },
        _ => t.contains(item),
    }
}

/// Fraction of `transactions` supporting every item. The empty itemset has
/// support 1.
pub fn support<T: Borrow<Transaction>>(
    items: &[Item],
    transactions: &[T],
    taxonomy: &Taxonomy,
) -> Result<f64, MineError> {
    if transactions.is_empty() {
        return Err(MineError::EmptyTransactions);
    }
    let hits = transactions
        .iter()
        .filter(|t| {
            items
                .iter()
                .all(|i| item_supported_by(i, (*t).borrow(), taxonomy))
        })
        .count();
    Ok(hits as f64 / transactions.len() as f64)
}

/// Structural compatibility of two distinct items within one itemset.
pub fn compatible(a: &Item, b: &Item) -> bool {
    a.attr() != b.attr() || matches!((a, b), (Item::CatNeg { .. }, Item::CatNeg { .. }))
}

/// Largest itemset size allowed by a conciseness threshold.
pub fn maxsize_for(conciseness: f64) -> usize {
    // absorb representation error, e.g. 1 / 0.2 = 4.999...
    ((1.0 / conciseness) + 1e-9).floor() as usize
}

fn check_params(n: usize, minsup: f64, maxsize: usize) -> Result<(), MineError> {
    if n == 0 {
        return Err(MineError::EmptyTransactions);
    }
    if !(minsup > 0.0 && minsup <= 1.0) {
        return Err(MineError::InvalidMinsup(minsup));
    }
    if maxsize == 0 {
        return Err(MineError::InvalidMaxsize);
    }
    Ok(())
}

/// Every itemset over `transactions` with support `>= minsup`, at most
/// `maxsize` items, and obeying the structural rules.
///
/// Level-one candidates are all raw items present plus every taxonomy
/// interval of each numeric attribute present. Output is ordered by size,
/// then support descending, then items.
pub fn mine<T: Borrow<Transaction>>(
    transactions: &[T],
    taxonomy: &Taxonomy,
    minsup: f64,
    maxsize: usize,
) -> Result<Vec<GeneralizedItemset>, MineError> {
    check_params(transactions.len(), minsup, maxsize)?;
    let min_count = engine::min_count(minsup, transactions.len());
    let empty: &[T] = &[];
    let (items, universe) = build_universe(transactions, empty, taxonomy, None, min_count);
    let found = Search {
        min_count,
        maxsize,
        compatible: |x: u32, y: u32| compatible(&items[x as usize], &items[y as usize]),
        prune_redundant: false,
    }
    .run(&universe);

    let n = transactions.len() as f64;
    let mut out: Vec<GeneralizedItemset> = found
        .into_iter()
        .map(|f| GeneralizedItemset {
            items: f.items.iter().map(|&i| items[i as usize]).collect(),
            count: f.mined,
            support: f.mined as f64 / n,
        })
        .collect();
    out.sort_by(|a, b| {
        a.items
            .len()
            .cmp(&b.items.len())
            .then(b.count.cmp(&a.count))
            .then_with(|| a.items.cmp(&b.items))
    });
    Ok(out)
}

/// Itemset found while mining one cluster against the rest of the data.
#[derive(Clone, Debug)]
pub struct ContextItemset {
    pub items: Vec<Item>,
    /// Supporting transactions inside the mined subset.
    pub mined_count: usize,
    /// Supporting transactions overall.
    pub total_count: usize,
}

/// Mines `mined` like [`mine`], additionally counting support over
/// `context`, and skips every itemset whose overall row set equals that of
/// one of its immediate subsets (adding the extra item filters nothing).
///
/// Optionally restricts items to the attributes in `attrs`.
pub fn mine_in_context<T: Borrow<Transaction>>(
    mined: &[T],
    context: &[T],
    taxonomy: &Taxonomy,
    attrs: Option<&HashSet<AttrId>>,
    minsup: f64,
    maxsize: usize,
) -> Result<Vec<ContextItemset>, MineError> {
    check_params(mined.len(), minsup, maxsize)?;
    let min_count = engine::min_count(minsup, mined.len());
    let (items, universe) = build_universe(mined, context, taxonomy, attrs, min_count);
    let found = Search {
        min_count,
        maxsize,
        compatible: |x: u32, y: u32| compatible(&items[x as usize], &items[y as usize]),
        prune_redundant: true,
    }
    .run(&universe);
    Ok(found
        .into_iter()
        .map(
            |Found {
                 items: ids,
                 mined,
                 total,
             }| ContextItemset {
                items: ids.iter().map(|&i| items[i as usize]).collect(),
                mined_count: mined,
                total_count: total,
            },
        )
        .collect())
}

enum NumericTest {
    Eq(f64),
    Range(f64, f64),
}

/// Frequent level-one items and their row sets over `mined ++ context`.
fn build_universe<T: Borrow<Transaction>>(
    mined: &[T],
    context: &[T],
    taxonomy: &Taxonomy,
    attrs: Option<&HashSet<AttrId>>,
    min_count: usize,
) -> (Vec<Item>, Universe) {
    let keep = |a: AttrId| attrs.is_none_or(|s| s.contains(&a));

    let mut numeric: BTreeMap<AttrId, Vec<f64>> = BTreeMap::new();
    let mut categorical: HashMap<Item, usize> = HashMap::new();
    for t in mined {
        for item in &t.borrow().items {
            if !keep(item.attr()) {
                continue;
            }
            match *item {
                Item::NumericEq { attr, value } => numeric.entry(attr).or_default().push(value),
                Item::CatEq { .. } | Item::CatNeg { .. } => {
                    *categorical.entry(*item).or_default() += 1
                }
                Item::Interval { .. } => {}
            }
        }
    }

    let mut items: Vec<Item> = Vec::new();
    for (&attr, values) in numeric.iter_mut() {
        values.sort_by(f64::total_cmp);
        let mut i = 0;
        while i < values.len() {
            let j = values[i..].partition_point(|v| *v == values[i]) + i;
            if j - i >= min_count {
                items.push(Item::NumericEq {
                    attr,
                    value: values[i],
                });
            }
            i = j;
        }
        for &node in taxonomy.attribute_nodes(attr) {
            let (_, iv) = taxonomy.interval(node).expect("attribute node");
            let count = values.partition_point(|v| *v <= iv.hi())
                - values.partition_point(|v| *v < iv.lo());
            if count >= min_count {
                items.push(Item::Interval { attr, node });
            }
        }
    }
    items.extend(
        categorical
            .iter()
            .filter(|(_, &c)| c >= min_count)
            .map(|(i, _)| *i),
    );
    items.sort_unstable();
    items.dedup();

    let max_attr = items
        .iter()
        .map(|i| i.attr().index() + 1)
        .max()
        .unwrap_or(0);
    let mut numeric_tests: Vec<Vec<(usize, NumericTest)>> =
        (0..max_attr).map(|_| Vec::new()).collect();
    let mut cat_ids: HashMap<Item, usize> = HashMap::new();
    for (id, item) in items.iter().enumerate() {
        match *item {
            Item::NumericEq { attr, value } => {
                numeric_tests[attr.index()].push((id, NumericTest::Eq(value)))
            }
            Item::Interval { attr, node } => {
                let (_, iv) = taxonomy.interval(node).expect("attribute node");
                numeric_tests[attr.index()].push((id, NumericTest::Range(iv.lo(), iv.hi())));
            }
            _ => {
                cat_ids.insert(*item, id);
            }
        }
    }

    let rows = mined.len() + context.len();
    let mut sets = vec![RowSet::empty(rows); items.len()];
    for (pos, t) in mined.iter().chain(context).enumerate() {
        for item in &t.borrow().items {
            match *item {
                Item::NumericEq { attr, value } => {
                    if let Some(tests) = numeric_tests.get(attr.index()) {
                        for (id, test) in tests {
                            let hit = match *test {
                                NumericTest::Eq(v) => v == value,
                                NumericTest::Range(lo, hi) => lo <= value && value <= hi,
                            };
                            if hit {
                                sets[*id].insert(pos);
                            }
                        }
                    }
                }
                Item::CatEq { .. } | Item::CatNeg { .. } => {
                    if let Some(&id) = cat_ids.get(item) {
                        sets[id].insert(pos);
                    }
                }
                Item::Interval { .. } => {}
            }
        }
    }
    (
        items,
        Universe {
            sets,
            mined_rows: mined.len(),
        },
    )
}
