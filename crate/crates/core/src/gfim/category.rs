//! Mining over an arbitrary category taxonomy of string items: the classic
//! generalized setting, where a transaction supports a category whenever it
//! holds one of the category's descendants.

use std::collections::{BTreeMap, BTreeSet};

use super::engine::{self, Search, Universe};
use super::rowset::RowSet;
use super::MineError;

/// Parent → child edges between item categories. Raw items are leaves.
#[derive(Clone, Debug, Default)]
pub struct CategoryTaxonomy {
    parents: BTreeMap<String, BTreeSet<String>>,
}

impl CategoryTaxonomy {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_edge(&mut self, parent: &str, child: &str) -> &mut Self {
        self.parents
            .entry(child.to_string())
            .or_default()
            .insert(parent.to_string());
        self
    }

    /// Every strict ancestor of `item`.
    pub fn ancestors(&self, item: &str) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut stack = vec![item.to_string()];
        while let Some(cur) = stack.pop() {
            for p in self.parents.get(&cur).into_iter().flatten() {
                if out.insert(p.clone()) {
                    stack.push(p.clone());
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymbolItemset {
    /// Sorted lexically.
    pub items: Vec<String>,
    pub support: f64,
}

/// Generalized frequent itemsets over string transactions. An itemset never
/// pairs an item with one of its ancestors.
pub fn mine_with_categories(
    transactions: &[Vec<String>],
    taxonomy: &CategoryTaxonomy,
    minsup: f64,
    maxsize: usize,
) -> Result<Vec<SymbolItemset>, MineError> {
    super::check_params(transactions.len(), minsup, maxsize)?;
    let extended: Vec<BTreeSet<String>> = transactions
        .iter()
        .map(|t| {
            let mut s: BTreeSet<String> = t.iter().cloned().collect();
            for item in t {
                s.extend(taxonomy.ancestors(item));
            }
            s
        })
        .collect();
    let symbols: Vec<String> = extended
        .iter()
        .flatten()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let ancestors: Vec<BTreeSet<String>> = symbols.iter().map(|s| taxonomy.ancestors(s)).collect();

    let mut sets = vec![RowSet::empty(transactions.len()); symbols.len()];
    for (row, t) in extended.iter().enumerate() {
        for s in t {
            let id = symbols.binary_search(s).expect("symbol indexed");
            sets[id].insert(row);
        }
    }
    let universe = Universe {
        sets,
        mined_rows: transactions.len(),
    };
    let min_count = engine::min_count(minsup, transactions.len());
    let found = Search {
        min_count,
        maxsize,
        compatible: |x: u32, y: u32| {
            let (x, y) = (x as usize, y as usize);
            !ancestors[x].contains(&symbols[y]) && !ancestors[y].contains(&symbols[x])
        },
        prune_redundant: false,
    }
    .run(&universe);

    let n = transactions.len() as f64;
    Ok(found
        .into_iter()
        .map(|f| SymbolItemset {
            items: f
                .items
                .iter()
                .map(|&i| symbols[i as usize].clone())
                .collect(),
            support: f.mined as f64 / n,
        })
        .collect())
}
