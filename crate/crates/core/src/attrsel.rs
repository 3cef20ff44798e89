//! Attribute selection by decision-tree Gini importance.
//!
//! One binary CART tree per cluster separates the cluster's rows from the
//! rest. Each tree's importances are normalized to sum to 1 and then
//! averaged over clusters, so every cluster weighs the same.

use rayon::prelude::*;
use thiserror::Error;

use crate::dataset::{AttrId, ClusterId, ColumnData, DataError, Dataset};

/// Splits must lower the node's impurity by more than this.
const MIN_DECREASE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum AttrSelError {
    #[error("dataset has no attributes")]
    NoAttributes,
    #[error("scaling factor p must be positive and finite, got {0}")]
    InvalidScale(f64),
    #[error("conciseness threshold must lie in (0, 1], got {0}")]
    InvalidConciseness(f64),
    #[error("cluster `{0}` has no rows")]
    EmptyCluster(ClusterId),
    #[error(transparent)]
    Data(#[from] DataError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SplitTest {
    /// Numeric: `value <= threshold` goes left.
    LessEq(f64),
    /// Categorical: `code == level` goes left.
    Equals(u32),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Split {
    pub attr: AttrId,
    pub test: SplitTest,
    /// Rows missing `attr` go left (else right).
    pub missing_left: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreeNode {
    pub depth: usize,
    pub n_samples: usize,
    /// Rows of the target cluster.
    pub n_positive: usize,
    pub impurity: f64,
    pub split: Option<Split>,
    /// Left and right child positions in [`DecisionTree::nodes`].
    pub children: Option<(usize, usize)>,
    /// Impurity minus the size-weighted child impurities; 0 at leaves.
    pub decrease: f64,
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        self.split.is_none()
    }
}

/// Gini impurity of a node with `pos` positives among `n` rows.
pub fn gini(n: usize, pos: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = pos as f64 / n as f64;
    let q = 1.0 - p;
    1.0 - p * p - q * q
}

/// Impurity decrease of a node holding `n` rows (`pos` positive, of which
/// `miss` / `miss_pos` lack the split attribute) when `left` / `left_pos`
/// non-missing rows go left. Missing rows join the side with more
/// non-missing rows, left on ties. Returns the decrease and that side.
pub fn split_decrease(
    n: usize,
    pos: usize,
    miss: usize,
    miss_pos: usize,
    left: usize,
    left_pos: usize,
) -> (f64, bool) {
    let mut right = n - miss - left;
    let mut right_pos = pos - miss_pos - left_pos;
    let (mut left, mut left_pos) = (left, left_pos);
    let missing_left = left >= right;
    if missing_left {
        left += miss;
        left_pos += miss_pos;
    } else {
        right += miss;
        right_pos += miss_pos;
    }
    let nf = n as f64;
    let dec = gini(n, pos)
        - (left as f64 / nf) * gini(left, left_pos)
        - (right as f64 / nf) * gini(right, right_pos);
    (dec, missing_left)
}

/// Threshold between adjacent distinct values `a < b`, with `a <= t < b`.
fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) / 2.0;
    if m < b {
        m
    } else {
        a
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecisionTree {
    nodes: Vec<TreeNode>,
    max_depth: usize,
}

impl DecisionTree {
    /// A tree from explicit nodes; the first node is the root.
    pub fn from_nodes(nodes: Vec<TreeNode>, max_depth: usize) -> Self {
        DecisionTree { nodes, max_depth }
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    fn goes_left(split: &Split, d: &Dataset, row: usize) -> bool {
        match (d.column(split.attr).data(), split.test) {
            (ColumnData::Numeric(v), SplitTest::LessEq(t)) => {
                v[row].map_or(split.missing_left, |x| x <= t)
            }
            (ColumnData::Categorical { codes, .. }, SplitTest::Equals(c)) => {
                codes[row].map_or(split.missing_left, |x| x == c)
            }
            _ => split.missing_left,
        }
    }

    /// Node positions visited by `row`, root first.
    pub fn path(&self, d: &Dataset, row: usize) -> Vec<usize> {
        let mut out = vec![0];
        let mut cur = 0;
        while let (Some(split), Some((l, r))) = (&self.nodes[cur].split, self.nodes[cur].children) {
            cur = if Self::goes_left(split, d, row) { l } else { r };
            out.push(cur);
        }
        out
    }

    /// Rows reaching each node.
    pub fn node_rows(&self, d: &Dataset) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.nodes.len()];
        for row in 0..d.n_rows() {
            for node in self.path(d, row) {
                out[node].push(row);
            }
        }
        out
    }

    /// Per attribute (by column), the sum over its split nodes of the node's
    /// share of rows times its decrease, normalized to sum to 1. All zeros
    /// when the tree has no split.
    pub fn gini_importance(&self, n_attributes: usize) -> Vec<f64> {
        let mut out = vec![0.0; n_attributes];
        let Some(root) = self.nodes.first() else {
            return out;
        };
        let n_root = root.n_samples as f64;
        for node in &self.nodes {
            if let Some(split) = &node.split {
                out[split.attr.index()] += node.n_samples as f64 / n_root * node.decrease;
            }
        }
        let total: f64 = out.iter().sum();
        if total > 0.0 {
            for v in &mut out {
                *v /= total;
            }
        }
        out
    }
}

/// Column data prepared once per dataset and shared by every tree.
enum Prepared<'d> {
    Numeric {
        values: &'d [Option<f64>],
        /// Non-missing rows by ascending value.
        order: Vec<u32>,
        missing: Vec<u32>,
    },
    Categorical {
        codes: &'d [Option<u32>],
        n_levels: usize,
    },
}

fn prepare(d: &Dataset) -> Vec<Prepared<'_>> {
    d.columns()
        .par_iter()
        .map(|col| match col.data() {
            ColumnData::Numeric(values) => {
                let mut order: Vec<u32> = (0..values.len() as u32)
                    .filter(|&r| values[r as usize].is_some())
                    .collect();
                order.sort_by(|&a, &b| {
                    values[a as usize]
                        .unwrap()
                        .total_cmp(&values[b as usize].unwrap())
                });
                let missing = (0..values.len() as u32)
                    .filter(|&r| values[r as usize].is_none())
                    .collect();
                Prepared::Numeric {
                    values,
                    order,
                    missing,
                }
            }
            ColumnData::Categorical { levels, codes } => Prepared::Categorical {
                codes,
                n_levels: levels.len(),
            },
        })
        .collect()
}

const DONE: u32 = u32::MAX;

#[derive(Clone, Copy)]
struct Best {
    decrease: f64,
    split: Split,
}

fn consider(best: &mut Option<Best>, decrease: f64, split: Split) {
    if decrease > MIN_DECREASE && best.is_none_or(|b| decrease > b.decrease) {
        *best = Some(Best { decrease, split });
    }
}

/// Best split of every open node (by slot) on one attribute.
fn best_splits_on(
    attr: AttrId,
    prep: &Prepared<'_>,
    slot_of_row: &[u32],
    target: &[bool],
    totals: &[(usize, usize)],
) -> Vec<Option<Best>> {
    let m = totals.len();
    let mut best = vec![None; m];
    match prep {
        Prepared::Numeric {
            values,
            order,
            missing,
        } => {
            let mut miss = vec![(0usize, 0usize); m];
            for &r in missing {
                let s = slot_of_row[r as usize];
                if s != DONE {
                    miss[s as usize].0 += 1;
                    miss[s as usize].1 += target[r as usize] as usize;
                }
            }
            let mut left = vec![(0usize, 0usize); m];
            let mut last: Vec<Option<f64>> = vec![None; m];
            for &r in order {
                let s = slot_of_row[r as usize];
                if s == DONE {
                    continue;
                }
                let s = s as usize;
                let v = values[r as usize].expect("non-missing");
                if let Some(prev) = last[s] {
                    if v > prev {
                        let (n, pos) = totals[s];
                        let (dec, missing_left) =
                            split_decrease(n, pos, miss[s].0, miss[s].1, left[s].0, left[s].1);
                        let split = Split {
                            attr,
                            test: SplitTest::LessEq(midpoint(prev, v)),
                            missing_left,
                        };
                        consider(&mut best[s], dec, split);
                    }
                }
                last[s] = Some(v);
                left[s].0 += 1;
                left[s].1 += target[r as usize] as usize;
            }
        }
        Prepared::Categorical { codes, n_levels } => {
            // per slot: counts per level, then the missing tally at the end
            let width = n_levels + 1;
            let mut counts = vec![(0usize, 0usize); m * width];
            for (r, code) in codes.iter().enumerate() {
                let s = slot_of_row[r];
                if s == DONE {
                    continue;
                }
                let k = s as usize * width + code.map_or(*n_levels, |c| c as usize);
                counts[k].0 += 1;
                counts[k].1 += target[r] as usize;
            }
            for s in 0..m {
                let (n, pos) = totals[s];
                let row = &counts[s * width..(s + 1) * width];
                let (mn, mp) = row[*n_levels];
                for (c, &(ln, lp)) in row[..*n_levels].iter().enumerate() {
                    if ln == 0 || ln == n - mn {
                        continue;
                    }
                    let (dec, missing_left) = split_decrease(n, pos, mn, mp, ln, lp);
                    let split = Split {
                        attr,
                        test: SplitTest::Equals(c as u32),
                        missing_left,
                    };
                    consider(&mut best[s], dec, split);
                }
            }
        }
    }
    best
}

fn fit(d: &Dataset, prepared: &[Prepared<'_>], target: &[bool], max_depth: usize) -> DecisionTree {
    let n = d.n_rows();
    let pos = target.iter().filter(|&&t| t).count();
    let mut nodes = vec![TreeNode {
        depth: 0,
        n_samples: n,
        n_positive: pos,
        impurity: gini(n, pos),
        split: None,
        children: None,
        decrease: 0.0,
    }];
    // open node of each row, as a slot into `open`
    let mut slot_of_row = vec![0u32; n];
    let mut open: Vec<usize> = vec![0];

    loop {
        // close nodes that cannot split
        let splittable: Vec<bool> = open
            .iter()
            .map(|&i| {
                let nd = &nodes[i];
                nd.depth < max_depth
                    && nd.n_samples >= 2
                    && nd.n_positive > 0
                    && nd.n_positive < nd.n_samples
            })
            .collect();
        if !splittable.iter().any(|&s| s) {
            break;
        }
        let totals: Vec<(usize, usize)> = open
            .iter()
            .zip(&splittable)
            .map(|(&i, &ok)| {
                if ok {
                    (nodes[i].n_samples, nodes[i].n_positive)
                } else {
                    (0, 0)
                }
            })
            .collect();
        for s in slot_of_row.iter_mut() {
            if *s != DONE && !splittable[*s as usize] {
                *s = DONE;
            }
        }

        let per_attr: Vec<Vec<Option<Best>>> = prepared
            .par_iter()
            .enumerate()
            .map(|(a, prep)| best_splits_on(AttrId::from(a), prep, &slot_of_row, target, &totals))
            .collect();
        let mut best: Vec<Option<Best>> = vec![None; open.len()];
        for attr_best in &per_attr {
            for (s, cand) in attr_best.iter().enumerate() {
                if let Some(c) = cand {
                    consider(&mut best[s], c.decrease, c.split);
                }
            }
        }

        // children get fresh slots; rows of unsplit nodes are done
        let mut next_open = Vec::new();
        let mut child_slots: Vec<Option<(u32, u32)>> = vec![None; open.len()];
        for (s, b) in best.iter().enumerate() {
            let Some(b) = b else { continue };
            let parent = open[s];
            let depth = nodes[parent].depth + 1;
            let l = nodes.len();
            for _ in 0..2 {
                nodes.push(TreeNode {
                    depth,
                    n_samples: 0,
                    n_positive: 0,
                    impurity: 0.0,
                    split: None,
                    children: None,
                    decrease: 0.0,
                });
            }
            nodes[parent].split = Some(b.split);
            nodes[parent].children = Some((l, l + 1));
            nodes[parent].decrease = b.decrease;
            child_slots[s] = Some((next_open.len() as u32, next_open.len() as u32 + 1));
            next_open.push(l);
            next_open.push(l + 1);
        }
        if next_open.is_empty() {
            break;
        }
        for row in 0..n {
            let s = slot_of_row[row];
            if s == DONE {
                continue;
            }
            match (child_slots[s as usize], &nodes[open[s as usize]].split) {
                (Some((ls, rs)), Some(split)) => {
                    let left = DecisionTree::goes_left(split, d, row);
                    let slot = if left { ls } else { rs };
                    slot_of_row[row] = slot;
                    let node = &mut nodes[next_open[slot as usize]];
                    node.n_samples += 1;
                    node.n_positive += target[row] as usize;
                }
                _ => slot_of_row[row] = DONE,
            }
        }
        for &i in &next_open {
            nodes[i].impurity = gini(nodes[i].n_samples, nodes[i].n_positive);
        }
        open = next_open;
    }
    DecisionTree { nodes, max_depth }
}

/// Binary tree separating cluster `c` from the other rows.
pub fn fit_binary_tree(
    d: &Dataset,
    c: &ClusterId,
    max_depth: usize,
) -> Result<DecisionTree, AttrSelError> {
    if d.n_attributes() == 0 {
        return Err(AttrSelError::NoAttributes);
    }
    let idx = d.cluster_index(c)? as u32;
    let target: Vec<bool> = d.label_codes().iter().map(|&l| l == idx).collect();
    Ok(fit(d, &prepare(d), &target, max_depth))
}

#[derive(Clone, Debug, PartialEq)]
pub struct AttributeScores {
    /// Normalized importances, one row per cluster, one column per attribute.
    pub per_cluster: Vec<Vec<f64>>,
    /// Mean of `per_cluster` over clusters, per attribute.
    pub scores: Vec<f64>,
    /// All attributes by descending score, ties by column order.
    pub ranking: Vec<AttrId>,
    /// The first `n_attr` of `ranking`.
    pub selected: Vec<AttrId>,
}

/// Number of attributes kept: `floor(p / conciseness)`, at least 1.
pub fn n_attr(conciseness: f64, p: f64) -> usize {
    (((1.0 / conciseness) * p + 1e-9).floor() as usize).max(1)
}

/// Attributes ranked by descending score, ties by column order.
pub fn rank_attributes(scores: &[f64]) -> Vec<AttrId> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order.into_iter().map(AttrId::from).collect()
}

/// Trees of depth `floor(1 / conciseness)`, one per cluster; keeps the
/// `n_attr(conciseness, p)` best attributes.
pub fn select_attributes(
    d: &Dataset,
    conciseness: f64,
    p: f64,
) -> Result<AttributeScores, AttrSelError> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(AttrSelError::InvalidScale(p));
    }
    if !(conciseness > 0.0 && conciseness <= 1.0) {
        return Err(AttrSelError::InvalidConciseness(conciseness));
    }
    let n_attrs = d.n_attributes();
    if n_attrs == 0 {
        return Err(AttrSelError::NoAttributes);
    }
    let max_depth = crate::gfim::maxsize_for(conciseness);
    let prepared = prepare(d);
    let labels = d.label_codes();
    let per_cluster: Vec<Vec<f64>> = (0..d.cluster_ids().len() as u32)
        .into_par_iter()
        .map(|c| {
            let target: Vec<bool> = labels.iter().map(|&l| l == c).collect();
            fit(d, &prepared, &target, max_depth).gini_importance(n_attrs)
        })
        .collect();

    let k = per_cluster.len() as f64;
    let scores: Vec<f64> = (0..n_attrs)
        .map(|a| per_cluster.iter().map(|g| g[a]).sum::<f64>() / k)
        .collect();
    let ranking = rank_attributes(&scores);
    let selected = ranking[..n_attr(conciseness, p).min(n_attrs)].to_vec();
    Ok(AttributeScores {
        per_cluster,
        scores,
        ranking,
        selected,
    })
}
