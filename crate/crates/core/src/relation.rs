//! Dense boolean relations between two finite index sets.
//!
//! Rows are stored as packed `u64` words so that composition and
//! intersection work a word at a time.

use std::fmt;

const WORD: usize = 64;

#[inline]
fn words_for(cols: usize) -> usize {
    cols.div_ceil(WORD).max(1)
}

/// A relation `R ⊆ {0..rows} × {0..cols}` stored as a bit grid.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    rows: usize,
    cols: usize,
    stride: usize,
    bits: Vec<u64>,
}

impl Relation {
    pub fn empty(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Relation {
            rows,
            cols,
            stride,
            bits: vec![0; rows * stride],
        }
    }

    pub fn full(rows: usize, cols: usize) -> Self {
        let mut r = Relation::empty(rows, cols);
        for x in 0..rows {
            r.fill_row(x);
        }
        r
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Relation::empty(n, n);
        for x in 0..n {
            r.insert(x, x);
        }
        r
    }

    pub fn from_pairs<I>(rows: usize, cols: usize, pairs: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut r = Relation::empty(rows, cols);
        for (x, y) in pairs {
            r.insert(x, y);
        }
        r
    }

    /// Builds a relation from a membership predicate.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut r = Relation::empty(rows, cols);
        for x in 0..rows {
            for y in 0..cols {
                if f(x, y) {
                    r.insert(x, y);
                }
            }
        }
        r
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    fn row_words(&self, x: usize) -> &[u64] {
        &self.bits[x * self.stride..(x + 1) * self.stride]
    }

    #[inline]
    fn row_words_mut(&mut self, x: usize) -> &mut [u64] {
        &mut self.bits[x * self.stride..(x + 1) * self.stride]
    }

    fn fill_row(&mut self, x: usize) {
        let cols = self.cols;
        let row = self.row_words_mut(x);
        for (w, word) in row.iter_mut().enumerate() {
            let lo = w * WORD;
            if lo >= cols {
                *word = 0;
            } else if cols - lo >= WORD {
                *word = u64::MAX;
            } else {
                *word = (1u64 << (cols - lo)) - 1;
            }
        }
    }

    #[inline]
    pub fn contains(&self, x: usize, y: usize) -> bool {
        debug_assert!(x < self.rows && y < self.cols);
        self.bits[x * self.stride + y / WORD] >> (y % WORD) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, x: usize, y: usize) {
        assert!(x < self.rows && y < self.cols, "pair out of range");
        self.bits[x * self.stride + y / WORD] |= 1 << (y % WORD);
    }

    #[inline]
    pub fn remove(&mut self, x: usize, y: usize) {
        assert!(x < self.rows && y < self.cols, "pair out of range");
        self.bits[x * self.stride + y / WORD] &= !(1 << (y % WORD));
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn row_is_empty(&self, x: usize) -> bool {
        self.row_words(x).iter().all(|&w| w == 0)
    }

    /// Iterates `Φ(x)` in increasing order.
    pub fn image(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.row_words(x)
            .iter()
            .enumerate()
            .flat_map(|(w, &word)| BitIter {
                word,
                base: w * WORD,
            })
    }

    /// Iterates all pairs in row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.rows).flat_map(move |x| self.image(x).map(move |y| (x, y)))
    }

    pub fn transpose(&self) -> Relation {
        let mut t = Relation::empty(self.cols, self.rows);
        for (x, y) in self.pairs() {
            t.insert(y, x);
        }
        t
    }

    /// Relational product: `x ↦ other(self(x))`.
    pub fn then(&self, other: &Relation) -> Relation {
        assert_eq!(self.cols, other.rows, "composition dimension mismatch");
        let mut out = Relation::empty(self.rows, other.cols);
        for x in 0..self.rows {
            let base = x * out.stride;
            for y in self.image(x) {
                let src = other.row_words(y);
                for (dst, &s) in out.bits[base..base + out.stride].iter_mut().zip(src) {
                    *dst |= s;
                }
            }
        }
        out
    }

    pub fn intersect(&self, other: &Relation) -> Relation {
        assert_eq!(self.dims(), other.dims(), "intersection dimension mismatch");
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    /// In-place intersection; returns whether anything was removed.
    pub fn intersect_with(&mut self, other: &Relation) -> bool {
        assert_eq!(self.dims(), other.dims(), "intersection dimension mismatch");
        let mut changed = false;
        for (a, &b) in self.bits.iter_mut().zip(&other.bits) {
            let next = *a & b;
            changed |= next != *a;
            *a = next;
        }
        changed
    }

    pub fn union(&self, other: &Relation) -> Relation {
        assert_eq!(self.dims(), other.dims(), "union dimension mismatch");
        let mut out = self.clone();
        for (a, &b) in out.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
        out
    }

    pub fn complement(&self) -> Relation {
        let mut out = Relation::full(self.rows, self.cols);
        for (a, &b) in out.bits.iter_mut().zip(&self.bits) {
            *a &= !b;
        }
        out
    }

    pub fn is_subset_of(&self, other: &Relation) -> bool {
        assert_eq!(self.dims(), other.dims(), "subset dimension mismatch");
        self.bits
            .iter()
            .zip(&other.bits)
            .all(|(&a, &b)| a & !b == 0)
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Relation[{}x{}]{{", self.rows, self.cols)?;
        for (i, (x, y)) in self.pairs().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({x},{y})")?;
        }
        write!(f, "}}")
    }
}

struct BitIter {
    word: u64,
    base: usize,
}

impl Iterator for BitIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.word == 0 {
            return None;
        }
        let tz = self.word.trailing_zeros() as usize;
        self.word &= self.word - 1;
        Some(self.base + tz)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_respects_width() {
        let r = Relation::full(2, 70);
        assert_eq!(r.len(), 140);
        assert!(r.contains(1, 69));
        assert_eq!(r.complement().len(), 0);
    }

    #[test]
    fn compose_matches_brute_force() {
        let a = Relation::from_pairs(3, 3, [(0, 1), (1, 2), (2, 0), (2, 2)]);
        let b = Relation::from_pairs(3, 3, [(1, 1), (2, 0), (0, 2)]);
        let c = a.then(&b);
        for x in 0..3 {
            for z in 0..3 {
                let expect = (0..3).any(|y| a.contains(x, y) && b.contains(y, z));
                assert_eq!(c.contains(x, z), expect, "({x},{z})");
            }
        }
    }

    #[test]
    fn remove_and_row_empty() {
        let mut r = Relation::identity(3);
        r.remove(1, 1);
        assert!(r.row_is_empty(1));
        assert!(!r.row_is_empty(0));
        assert_eq!(r.image(2).collect::<Vec<_>>(), vec![2]);
    }
}
