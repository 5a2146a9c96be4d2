//! Restricted Damerau-Levenshtein (optimal string alignment) distance.
//!
//! Unit-cost insertions, deletions, substitutions and adjacent transpositions,
//! where no substring is edited twice. This variant does not satisfy the
//! triangle inequality, so nothing here or downstream indexes strings in a
//! metric tree.

use std::mem;

/// Full dynamic-programming distance over Unicode scalar values.
pub fn dl_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    osa(&a, &b)
}

fn osa(a: &[char], b: &[char]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let m = b.len();
    let mut prev2 = vec![0usize; m + 1];
    let mut prev: Vec<usize> = (0..=m).collect();
    let mut cur = vec![0usize; m + 1];
    for i in 1..=a.len() {
        cur[0] = i;
        for j in 1..=m {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            let mut d = (prev[j] + 1).min(cur[j - 1] + 1).min(prev[j - 1] + cost);
            if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                d = d.min(prev2[j - 2] + 1);
            }
            cur[j] = d;
        }
        mem::swap(&mut prev2, &mut prev);
        mem::swap(&mut prev, &mut cur);
    }
    prev[m]
}

/// Distance if it is at most `cap`, otherwise `None`.
///
/// Convenience wrapper over [`BoundedMatcher`]; use the matcher directly when
/// comparing one query against many strings.
pub fn dl_within(a: &str, b: &str, cap: usize) -> Option<usize> {
    BoundedMatcher::new(a).within(b, cap)
}

/// Banded, early-abandoning distance computation against a fixed query.
///
/// Only cells with `|i - j| <= cap` are evaluated; everything outside the
/// band is known to exceed `cap`. The scan stops once two consecutive rows
/// are entirely above `cap` (a transposition can skip one row, never two).
#[derive(Debug, Clone)]
pub struct BoundedMatcher {
    query: Vec<char>,
    other: Vec<char>,
    rows: [Vec<usize>; 3],
}

impl BoundedMatcher {
    pub fn new(query: &str) -> Self {
        Self {
            query: query.chars().collect(),
            other: Vec::new(),
            rows: [Vec::new(), Vec::new(), Vec::new()],
        }
    }

    pub fn query_len(&self) -> usize {
        self.query.len()
    }

    pub fn within(&mut self, other: &str, cap: usize) -> Option<usize> {
        self.other.clear();
        self.other.extend(other.chars());
        let a = &self.query;
        let b = &self.other;
        let (n, m) = (a.len(), b.len());
        if n.abs_diff(m) > cap {
            return None;
        }
        if n == 0 || m == 0 {
            return Some(n.max(m));
        }
        let big = cap + 1;
        let [prev2, prev, cur] = &mut self.rows;
        for row in [&mut *prev2, &mut *prev, &mut *cur] {
            row.clear();
            row.resize(m + 1, big);
        }
        for (j, cell) in prev.iter_mut().enumerate().take(cap.min(m) + 1) {
            *cell = j;
        }
        let mut prev_row_over = false;
        for i in 1..=n {
            let lo = i.saturating_sub(cap).max(1);
            let hi = (i + cap).min(m);
            cur.fill(big);
            if i <= cap {
                cur[0] = i;
            }
            let mut row_min = cur[0];
            for j in lo..=hi {
                let cost = usize::from(a[i - 1] != b[j - 1]);
                let mut d = (prev[j] + 1).min(cur[j - 1] + 1).min(prev[j - 1] + cost);
                if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                    d = d.min(prev2[j - 2] + 1);
                }
                let d = d.min(big);
                cur[j] = d;
                row_min = row_min.min(d);
            }
            let row_over = row_min > cap;
            if row_over && prev_row_over {
                return None;
            }
            prev_row_over = row_over;
            mem::swap(prev2, prev);
            mem::swap(prev, cur);
        }
        let d = prev[m];
        (d <= cap).then_some(d)
    }
}
