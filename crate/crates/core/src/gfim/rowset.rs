//! Fixed-width bitsets over a row space.

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowSet {
    words: Vec<u64>,
    len: usize,
}

impl RowSet {
    pub fn empty(len: usize) -> Self {
        RowSet {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = RowSet {
            words: vec![u64::MAX; len.div_ceil(64)],
            len,
        };
        s.clear_tail();
        s
    }

    fn clear_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn intersect_with(&mut self, other: &RowSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn intersection(&self, other: &RowSet) -> RowSet {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    /// Sizes of `self ∩ other` restricted to rows `< split` and overall.
    pub fn split_intersection_counts(&self, other: &RowSet, split: usize) -> (usize, usize) {
        let full_words = split / 64;
        let mut head = 0usize;
        let mut total = 0usize;
        for (i, (a, b)) in self.words.iter().zip(&other.words).enumerate() {
            let w = a & b;
            let ones = w.count_ones() as usize;
            total += ones;
            if i < full_words {
                head += ones;
            } else if i == full_words {
                let rem = split % 64;
                if rem != 0 {
                    head += (w & ((1u64 << rem) - 1)).count_ones() as usize;
                }
            }
        }
        (head, total)
    }

    /// Sizes of `self` restricted to rows `< split` and overall.
    pub fn split_counts(&self, split: usize) -> (usize, usize) {
        self.split_intersection_counts(self, split)
    }
}
