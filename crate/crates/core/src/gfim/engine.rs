//! Level-wise (Apriori) search over an abstract item universe.
//!
//! Items are dense ids whose row sets live in one shared row space. The
//! first `mined_rows` rows are the transactions being mined; any rows after
//! them are context, counted only so callers can see how an itemset behaves
//! outside the mined subset.

use std::collections::HashMap;

use rayon::prelude::*;

use super::rowset::RowSet;

pub(crate) struct Universe {
    pub sets: Vec<RowSet>,
    pub mined_rows: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Found {
    /// Ascending item ids.
    pub items: Vec<u32>,
    /// Supporting rows among the mined rows.
    pub mined: usize,
    /// Supporting rows across the whole row space.
    pub total: usize,
}

pub(crate) struct Search<F> {
    pub min_count: usize,
    pub maxsize: usize,
    pub compatible: F,
    /// Drop itemsets whose row set (over the whole space) equals that of one
    /// of their immediate subsets, together with all their supersets.
    pub prune_redundant: bool,
}

/// Smallest count `c` with `c / n >= minsup`, evaluated in `f64` exactly as
/// the support comparison is.
pub(crate) fn min_count(minsup: f64, n: usize) -> usize {
    let nf = n as f64;
    let mut c = ((minsup * nf).ceil().max(0.0) as usize).min(n);
    while c > 0 && (c - 1) as f64 / nf >= minsup {
        c -= 1;
    }
    while c < n && (c as f64 / nf) < minsup {
        c += 1;
    }
    c
}

impl<F: Fn(u32, u32) -> bool + Sync> Search<F> {
    pub fn run(&self, u: &Universe) -> Vec<Found> {
        let mut out: Vec<Found> = Vec::new();
        if self.maxsize == 0 {
            return out;
        }
        let mut level: Vec<Found> = (0..u.sets.len() as u32)
            .filter_map(|id| {
                let (mined, total) = u.sets[id as usize].split_counts(u.mined_rows);
                (mined >= self.min_count && mined > 0).then(|| Found {
                    items: vec![id],
                    mined,
                    total,
                })
            })
            .collect();

        let mut k = 1;
        while !level.is_empty() && k < self.maxsize {
            let next = self.extend(u, &level, k);
            out.append(&mut level);
            level = next;
            k += 1;
        }
        out.append(&mut level);
        out
    }

    /// Joins size-`k` itemsets sharing their first `k - 1` items.
    fn extend(&self, u: &Universe, level: &[Found], k: usize) -> Vec<Found> {
        let index: HashMap<&[u32], usize> = level
            .iter()
            .map(|f| (f.items.as_slice(), f.total))
            .collect();

        let mut runs = Vec::new();
        let mut start = 0;
        for i in 1..=level.len() {
            if i == level.len() || level[i].items[..k - 1] != level[start].items[..k - 1] {
                runs.push((start, i));
                start = i;
            }
        }

        runs.into_par_iter()
            .flat_map_iter(|(s, e)| self.join_run(u, &level[s..e], &index, k))
            .collect()
    }

    fn join_run(
        &self,
        u: &Universe,
        run: &[Found],
        index: &HashMap<&[u32], usize>,
        k: usize,
    ) -> Vec<Found> {
        let mut out = Vec::new();
        if run.len() < 2 {
            return out;
        }
        let prefix = &run[0].items[..k - 1];
        let prefix_set = prefix.iter().fold(None::<RowSet>, |acc, &id| match acc {
            None => Some(u.sets[id as usize].clone()),
            Some(mut s) => {
                s.intersect_with(&u.sets[id as usize]);
                Some(s)
            }
        });
        let mut cand = Vec::with_capacity(k + 1);
        let mut sub = Vec::with_capacity(k);
        for a in 0..run.len() {
            let x = run[a].items[k - 1];
            let px = match &prefix_set {
                Some(p) => p.intersection(&u.sets[x as usize]),
                None => u.sets[x as usize].clone(),
            };
            'pair: for b in run.iter().skip(a + 1) {
                let y = b.items[k - 1];
                if !(self.compatible)(x, y) {
                    continue;
                }
                cand.clear();
                cand.extend_from_slice(prefix);
                cand.push(x);
                cand.push(y);

                let mut sub_totals = [run[a].total, b.total].to_vec();
                for skip in 0..k - 1 {
                    sub.clear();
                    sub.extend(
                        cand.iter()
                            .enumerate()
                            .filter(|&(i, _)| i != skip)
                            .map(|(_, &v)| v),
                    );
                    match index.get(sub.as_slice()) {
                        Some(&t) => sub_totals.push(t),
                        None => continue 'pair,
                    }
                }

                let (mined, total) =
                    px.split_intersection_counts(&u.sets[y as usize], u.mined_rows);
                if mined < self.min_count || mined == 0 {
                    continue;
                }
                if self.prune_redundant && sub_totals.contains(&total) {
                    continue;
                }
                out.push(Found {
                    items: cand.clone(),
                    mined,
                    total,
                });
            }
        }
        out
    }
}
