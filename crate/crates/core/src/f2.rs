//! Bit-packed vectors over F2 and incremental row reduction.
//!
//! Every linear-algebra question in the crate (kernels, images, preimages,
//! homology) eventually lands here. Vectors have a fixed length; reduction
//! uses the first set bit as pivot.

use std::fmt;

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { len, words: vec![0; len.div_ceil(WORD)] }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_ones(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        debug_assert!(i < self.len);
        let m = 1u64 << (i % WORD);
        if b {
            self.words[i / WORD] |= m;
        } else {
            self.words[i / WORD] &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// First set bit at index `>= from`.
    pub fn first_one_from(&self, from: usize) -> Option<usize> {
        if from >= self.len {
            return None;
        }
        let mut wi = from / WORD;
        let mut w = self.words[wi] & (!0u64 << (from % WORD));
        loop {
            if w != 0 {
                return Some(wi * WORD + w.trailing_zeros() as usize);
            }
            wi += 1;
            if wi >= self.words.len() {
                return None;
            }
            w = self.words[wi];
        }
    }

    pub fn first_one(&self) -> Option<usize> {
        self.first_one_from(0)
    }

    pub fn last_one(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate().rev() {
            if w != 0 {
                return Some(wi * WORD + 63 - w.leading_zeros() as usize);
            }
        }
        None
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD + t)
                }
            })
        })
    }

    /// Copy of `self` with bits permuted: bit `i` moves to `perm[i]`.
    pub fn permuted(&self, perm: &[usize], new_len: usize) -> BitVec {
        BitVec::from_ones(new_len, self.iter_ones().map(|i| perm[i]))
    }

    pub fn dot(&self, other: &BitVec) -> bool {
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() % 2 == 1
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.len {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        write!(f, "]")
    }
}

/// Incremental echelon form. Rows are never modified after insertion, so the
/// expression of a vector in terms of inserted items is unique and only uses
/// items needed to span it.
#[derive(Clone, Debug)]
pub struct Echelon {
    dim: usize,
    rows: Vec<BitVec>,
    pivot_row: Vec<Option<u32>>,
    history: Option<(usize, Vec<BitVec>)>,
    inserted: usize,
}

pub enum Insert {
    /// The vector was independent; it became row `row` with the given pivot.
    Independent { pivot: usize },
    /// The vector reduced to zero. With history enabled, the relation among
    /// inserted items (including this one) is returned.
    Dependent(Option<BitVec>),
}

impl Echelon {
    pub fn new(dim: usize) -> Self {
        Echelon { dim, rows: Vec::new(), pivot_row: vec![None; dim], history: None, inserted: 0 }
    }

    /// Track for every row which inserted items it is a sum of. `capacity`
    /// bounds the number of inserts.
    pub fn with_history(dim: usize, capacity: usize) -> Self {
        let mut e = Self::new(dim);
        e.history = Some((capacity, Vec::new()));
        e
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    fn reduce_inner(&self, v: &mut BitVec, mut hist: Option<&mut BitVec>) {
        let mut from = 0;
        while let Some(p) = v.first_one_from(from) {
            if let Some(r) = self.pivot_row[p] {
                v.xor_assign(&self.rows[r as usize]);
                if let (Some(h), Some((_, hs))) = (hist.as_deref_mut(), &self.history) {
                    h.xor_assign(&hs[r as usize]);
                }
            }
            from = p + 1;
        }
    }

    pub fn reduce(&self, v: &mut BitVec) {
        self.reduce_inner(v, None);
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        let mut w = v.clone();
        self.reduce(&mut w);
        w.is_zero()
    }

    /// Writes `v` as a sum of inserted items, if it is in the span.
    pub fn solve(&self, v: &BitVec) -> Option<BitVec> {
        let cap = self.history.as_ref().expect("solve needs history").0;
        let mut w = v.clone();
        let mut h = BitVec::zeros(cap);
        self.reduce_inner(&mut w, Some(&mut h));
        w.is_zero().then_some(h)
    }

    pub fn insert(&mut self, v: BitVec) -> Insert {
        debug_assert_eq!(v.len(), self.dim);
        let idx = self.inserted;
        self.inserted += 1;
        let mut w = v;
        let mut h = self.history.as_ref().map(|(cap, _)| BitVec::unit(*cap, idx));
        self.reduce_inner(&mut w, h.as_mut());
        match w.first_one() {
            None => Insert::Dependent(h),
            Some(p) => {
                self.pivot_row[p] = Some(self.rows.len() as u32);
                self.rows.push(w);
                if let (Some((_, hs)), Some(h)) = (self.history.as_mut(), h) {
                    hs.push(h);
                }
                Insert::Independent { pivot: p }
            }
        }
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }
}

/// Rank of a list of vectors.
pub fn rank(dim: usize, vs: impl IntoIterator<Item = BitVec>) -> usize {
    let mut e = Echelon::new(dim);
    for v in vs {
        e.insert(v);
    }
    e.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bits_across_words() {
        let mut v = BitVec::zeros(130);
        v.set(0, true);
        v.set(64, true);
        v.set(129, true);
        assert_eq!(v.iter_ones().collect::<Vec<_>>(), vec![0, 64, 129]);
        assert_eq!(v.first_one_from(1), Some(64));
        assert_eq!(v.last_one(), Some(129));
        assert_eq!(v.count_ones(), 3);
    }

    #[test]
    fn solve_returns_combination() {
        let mut e = Echelon::with_history(4, 3);
        e.insert(BitVec::from_ones(4, [0, 1]));
        e.insert(BitVec::from_ones(4, [1, 2]));
        e.insert(BitVec::from_ones(4, [3]));
        let c = e.solve(&BitVec::from_ones(4, [0, 2, 3])).unwrap();
        assert_eq!(c.iter_ones().collect::<Vec<_>>(), vec![0, 1, 2]);
        assert!(e.solve(&BitVec::from_ones(4, [0])).is_none());
    }

    proptest! {
        #[test]
        fn dependent_history_is_a_relation(rows in proptest::collection::vec(proptest::collection::vec(any::<bool>(), 9), 1..14)) {
            let vs: Vec<BitVec> = rows.iter().map(|r| BitVec::from_ones(9, r.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i))).collect();
            let mut e = Echelon::with_history(9, vs.len());
            for v in &vs {
                if let Insert::Dependent(Some(h)) = e.insert(v.clone()) {
                    let mut acc = BitVec::zeros(9);
                    for i in h.iter_ones() { acc.xor_assign(&vs[i]); }
                    prop_assert!(acc.is_zero());
                }
            }
            prop_assert!(e.rank() <= 9);
        }
    }
}
