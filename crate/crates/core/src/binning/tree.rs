//! Supervised binning: a one-feature classification tree grown best-first
//! on the Gini criterion. Each leaf becomes one interval.

use std::collections::BinaryHeap;

use super::{min_max, BinMethod, BinningError, Interval};

/// Run of equal values with its per-class counts.
struct Group {
    value: f64,
    counts: Vec<usize>,
}

fn gini_mass(counts: &[usize], n: usize) -> f64 {
    // n · gini = n - Σ c² / n
    if n == 0 {
        return 0.0;
    }
    let sq: f64 = counts.iter().map(|&c| (c as f64) * (c as f64)).sum();
    n as f64 - sq / n as f64
}

/// Best split of groups `[start, end)`: returns the first group of the right
/// child and the decrease in count-weighted impurity.
fn best_split(
    groups: &[Group],
    start: usize,
    end: usize,
    n_classes: usize,
) -> Option<(usize, f64)> {
    if end - start < 2 {
        return None;
    }
    let mut total = vec![0usize; n_classes];
    for g in &groups[start..end] {
        for (t, c) in total.iter_mut().zip(&g.counts) {
            *t += c;
        }
    }
    let n: usize = total.iter().sum();
    let parent = gini_mass(&total, n);
    if parent <= 0.0 {
        return None;
    }
    let mut left = vec![0usize; n_classes];
    let mut right = total;
    let mut n_left = 0;
    let mut best: Option<(usize, f64)> = None;
    for cut in start + 1..end {
        for (k, &c) in groups[cut - 1].counts.iter().enumerate() {
            left[k] += c;
            right[k] -= c;
            n_left += c;
        }
        let decrease = parent - gini_mass(&left, n_left) - gini_mass(&right, n - n_left);
        if decrease > 1e-12 && best.is_none_or(|(_, d)| decrease > d) {
            best = Some((cut, decrease));
        }
    }
    best
}

#[derive(PartialEq)]
struct Candidate {
    decrease: f64,
    start: usize,
    end: usize,
    cut: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // max-heap on decrease; leftmost leaf first on ties
        self.decrease
            .total_cmp(&other.decrease)
            .then_with(|| other.start.cmp(&self.start))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Intervals spanning the value range of each leaf of a single-feature
/// decision tree predicting `labels` from `values`.
///
/// Splits fall between adjacent distinct values (the midpoint threshold), the
/// leaf with the largest impurity decrease is split first, and growth stops
/// at `max_leaves` leaves or when no split reduces impurity. Leaves holding a
/// single distinct value produce no interval.
pub fn bin_tree_based(
    values: &[f64],
    labels: &[u32],
    max_leaves: usize,
) -> Result<Vec<Interval>, BinningError> {
    if values.len() != labels.len() {
        return Err(BinningError::LengthMismatch {
            values: values.len(),
            labels: labels.len(),
        });
    }
    if max_leaves == 0 {
        return Err(BinningError::ZeroBins);
    }
    min_max(values)?;
    let n_classes = labels.iter().copied().max().unwrap_or(0) as usize + 1;
    let mut pairs: Vec<(f64, u32)> = values
        .iter()
        .copied()
        .zip(labels.iter().copied())
        .filter(|(v, _)| v.is_finite())
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut groups: Vec<Group> = Vec::new();
    for (v, l) in pairs {
        match groups.last_mut() {
            Some(g) if g.value == v => g.counts[l as usize] += 1,
            _ => {
                let mut counts = vec![0; n_classes];
                counts[l as usize] = 1;
                groups.push(Group { value: v, counts });
            }
        }
    }

    let mut leaves: Vec<(usize, usize)> = Vec::new();
    let mut heap = BinaryHeap::new();
    let push = |heap: &mut BinaryHeap<Candidate>, leaves: &mut Vec<(usize, usize)>, s, e| {
        match best_split(&groups, s, e, n_classes) {
            Some((cut, decrease)) => heap.push(Candidate {
                decrease,
                start: s,
                end: e,
                cut,
            }),
            None => leaves.push((s, e)),
        }
    };
    push(&mut heap, &mut leaves, 0, groups.len());
    while let Some(c) = heap.pop() {
        if leaves.len() + heap.len() + 2 > max_leaves {
            leaves.push((c.start, c.end));
            continue;
        }
        push(&mut heap, &mut leaves, c.start, c.cut);
        push(&mut heap, &mut leaves, c.cut, c.end);
    }
    leaves.sort_unstable();
    Ok(leaves
        .into_iter()
        .filter_map(|(s, e)| {
            Interval::new(groups[s].value, groups[e - 1].value, BinMethod::TreeBased).ok()
        })
        .collect())
}
