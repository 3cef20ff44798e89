//! Exact one-dimensional k-means.
//!
//! Optimal clusters of sorted data are contiguous, so the problem reduces to
//! choosing `k - 1` cut points. The dynamic program runs over the sorted
//! distinct values (weighted by multiplicity) and uses divide and conquer on
//! the monotone split points, giving `O(k · d · log d)` for `d` distinct
//! values.

use super::{min_max, sorted_finite, BinMethod, BinningError, Interval};

struct Prefix {
    w: Vec<f64>,
    s1: Vec<f64>,
    s2: Vec<f64>,
}

impl Prefix {
    fn new(xs: &[f64], ws: &[f64]) -> Self {
        let shift = xs.iter().zip(ws).map(|(x, w)| x * w).sum::<f64>() / ws.iter().sum::<f64>();
        let mut p = Prefix {
            w: vec![0.0; xs.len() + 1],
            s1: vec![0.0; xs.len() + 1],
            s2: vec![0.0; xs.len() + 1],
        };
        for (i, (&x, &w)) in xs.iter().zip(ws).enumerate() {
            let y = x - shift;
            p.w[i + 1] = p.w[i] + w;
            p.s1[i + 1] = p.s1[i] + w * y;
            p.s2[i + 1] = p.s2[i] + w * y * y;
        }
        p
    }

    /// Weighted SSE of distinct values `i..=j`.
    fn cost(&self, i: usize, j: usize) -> f64 {
        let w = self.w[j + 1] - self.w[i];
        let s1 = self.s1[j + 1] - self.s1[i];
        let s2 = self.s2[j + 1] - self.s2[i];
        (s2 - s1 * s1 / w).max(0.0)
    }
}

fn fill_layer(
    prefix: &Prefix,
    prev: &[f64],
    cur: &mut [f64],
    arg: &mut [usize],
    m: usize,
    (jl, jr): (usize, usize),
    (ol, or): (usize, usize),
) {
    if jl > jr {
        return;
    }
    let mid = (jl + jr) / 2;
    let mut best = f64::INFINITY;
    let mut best_i = ol.max(m);
    for i in ol.max(m)..=or.min(mid) {
        let c = prev[i - 1] + prefix.cost(i, mid);
        if c < best {
            best = c;
            best_i = i;
        }
    }
    cur[mid] = best;
    arg[mid] = best_i;
    if mid > jl {
        fill_layer(prefix, prev, cur, arg, m, (jl, mid - 1), (ol, best_i));
    }
    fill_layer(prefix, prev, cur, arg, m, (mid + 1, jr), (best_i, or));
}

/// Optimal contiguous `k`-partition of the values, as `(min, max)` per group
/// in ascending order. Singleton groups have `min == max`.
pub fn optimal_partition(values: &[f64], k: usize) -> Result<Vec<(f64, f64)>, BinningError> {
    if k == 0 {
        return Err(BinningError::ZeroBins);
    }
    let sorted = sorted_finite(values);
    if sorted.is_empty() {
        return Err(BinningError::NoValues);
    }
    let mut xs: Vec<f64> = Vec::new();
    let mut ws: Vec<f64> = Vec::new();
    for v in sorted {
        if xs.last() == Some(&v) {
            *ws.last_mut().unwrap() += 1.0;
        } else {
            xs.push(v);
            ws.push(1.0);
        }
    }
    let d = xs.len();
    if k > d {
        return Err(BinningError::TooManyBins { k, distinct: d });
    }
    let prefix = Prefix::new(&xs, &ws);

    let mut layers: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut args: Vec<Vec<usize>> = Vec::with_capacity(k);
    layers.push((0..d).map(|j| prefix.cost(0, j)).collect());
    args.push(vec![0; d]);
    for m in 1..k {
        let mut cur = vec![f64::INFINITY; d];
        let mut arg = vec![0; d];
        fill_layer(
            &prefix,
            &layers[m - 1],
            &mut cur,
            &mut arg,
            m,
            (m, d - 1),
            (m, d - 1),
        );
        layers.push(cur);
        args.push(arg);
    }

    let mut groups = Vec::with_capacity(k);
    let mut end = d - 1;
    for m in (0..k).rev() {
        let start = if m == 0 { 0 } else { args[m][end] };
        groups.push((xs[start], xs[end]));
        if m > 0 {
            end = start - 1;
        }
    }
    groups.reverse();
    Ok(groups)
}

/// Total SSE of `values` grouped by the given `(min, max)` ranges.
pub fn sse_of_groups(values: &[f64], groups: &[(f64, f64)]) -> f64 {
    groups
        .iter()
        .map(|&(lo, hi)| {
            let members: Vec<f64> = values
                .iter()
                .copied()
                .filter(|v| lo <= *v && *v <= hi)
                .collect();
            let mean = members.iter().sum::<f64>() / members.len() as f64;
            members.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        })
        .sum()
}

/// One interval per optimal 1-D k-means group; single-value groups are
/// dropped.
pub fn bin_kmeans_1d(values: &[f64], k: usize) -> Result<Vec<Interval>, BinningError> {
    min_max(values)?;
    let groups = optimal_partition(values, k)?;
    Ok(groups
        .into_iter()
        .filter_map(|(lo, hi)| Interval::new(lo, hi, BinMethod::KMeans1D).ok())
        .collect())
}
