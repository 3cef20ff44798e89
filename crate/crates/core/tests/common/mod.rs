#![allow(dead_code)]

use cluster_explain::dataset::{ClusterId, Column, Dataset};
use cluster_explain::taxonomy::Taxonomy;
use cluster_explain::transactions::{Item, Transaction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random mixed-type dataset with a few missing cells and up to 3 clusters.
pub fn random_dataset(seed: u64, rows: usize, attrs: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clusters = rng.random_range(1..=3i64);
    let labels: Vec<i64> = (0..rows).map(|_| rng.random_range(0..clusters)).collect();
    let mut cols = Vec::new();
    for a in 0..attrs {
        let missing = if rng.random_bool(0.3) { 0.05 } else { 0.0 };
        if rng.random_bool(0.6) {
            // skew values by cluster so some itemsets are cluster-specific
            let spread = rng.random_range(3..40);
            let v = labels
                .iter()
                .map(|&l| {
                    (!rng.random_bool(missing))
                        .then(|| (rng.random_range(0..spread) + l * spread / 2) as f64)
                })
                .collect();
            cols.push(Column::numeric(format!("n{a}"), v).unwrap());
        } else {
            let levels = ["u", "v", "w", "x", "y"];
            let k = rng.random_range(2..=levels.len());
            let v: Vec<Option<&str>> = labels
                .iter()
                .map(|&l| {
                    (!rng.random_bool(missing)).then(|| {
                        if rng.random_bool(0.5) {
                            levels[l as usize % k]
                        } else {
                            levels[rng.random_range(0..k)]
                        }
                    })
                })
                .collect();
            cols.push(Column::categorical(format!("c{a}"), &v));
        }
    }
    Dataset::new(
        cols,
        labels.into_iter().map(ClusterId::from).collect(),
        "cluster",
    )
    .unwrap()
}

/// Support check written directly from the containment semantics.
pub fn supports(t: &Transaction, item: &Item, taxonomy: &Taxonomy) -> bool {
    match item {
        Item::Interval { attr, node } => {
            let (_, iv) = taxonomy.interval(*node).unwrap();
            t.items.iter().any(|i| match i {
                Item::NumericEq { attr: a, value } => {
                    a == attr && iv.lo() <= *value && *value <= iv.hi()
                }
                _ => false,
            })
        }
        other => t.items.iter().any(|i| i == other),
    }
}

pub fn legal_pair(a: &Item, b: &Item, taxonomy: &Taxonomy) -> bool {
    if let (Item::Interval { node: x, .. }, Item::Interval { node: y, .. }) = (a, b) {
        if taxonomy.is_ancestor(*x, *y) || taxonomy.is_ancestor(*y, *x) {
            return false;
        }
    }
    a.attr() != b.attr() || matches!((a, b), (Item::CatNeg { .. }, Item::CatNeg { .. }))
}

/// Every legal itemset up to `maxsize` with its support count, by
/// enumerating combinations of frequent single items and counting directly.
pub fn brute_force(
    transactions: &[&Transaction],
    taxonomy: &Taxonomy,
    minsup: f64,
    maxsize: usize,
) -> Vec<(Vec<Item>, usize)> {
    let n = transactions.len();
    let frequent = |c: usize| c as f64 / n as f64 >= minsup && c > 0;
    let mut universe: Vec<Item> = transactions
        .iter()
        .flat_map(|t| t.items.iter().copied())
        .collect();
    for attr in taxonomy.attributes() {
        for &node in taxonomy.attribute_nodes(attr) {
            universe.push(Item::Interval { attr, node });
        }
    }
    universe.sort();
    universe.dedup();
    let count = |set: &[Item]| {
        transactions
            .iter()
            .filter(|t| set.iter().all(|i| supports(t, i, taxonomy)))
            .count()
    };
    let singles: Vec<Item> = universe
        .into_iter()
        .filter(|i| frequent(count(&[*i])))
        .collect();

    let mut out = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    fn walk(
        start: usize,
        stack: &mut Vec<usize>,
        singles: &[Item],
        maxsize: usize,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) {
        for i in start..singles.len() {
            stack.push(i);
            // supersets of an illegal or infrequent set are never legal and frequent
            if visit(stack) && stack.len() < maxsize {
                walk(i + 1, stack, singles, maxsize, visit);
            }
            stack.pop();
        }
    }
    walk(0, &mut stack, &singles, maxsize, &mut |idx| {
        let set: Vec<Item> = idx.iter().map(|&i| singles[i]).collect();
        for (x, a) in set.iter().enumerate() {
            for b in &set[x + 1..] {
                if !legal_pair(a, b, taxonomy) {
                    return false;
                }
            }
        }
        let c = count(&set);
        if frequent(c) {
            out.push((set, c));
        }
        frequent(c)
    });
    for (set, _) in &mut out {
        set.sort();
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}
