use std::fmt;

use fixedbitset::FixedBitSet;

/// A subset of a dense ground set `0..n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementSet {
    bits: FixedBitSet,
}

impl ElementSet {
    pub fn empty(n: usize) -> Self {
        ElementSet { bits: FixedBitSet::with_capacity(n) }
    }

    pub fn full(n: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(n);
        bits.insert_range(..);
        ElementSet { bits }
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(n: usize, elems: I) -> Self {
        let mut s = Self::empty(n);
        for e in elems {
            s.insert(e);
        }
        s
    }

    /// Builds the subset encoded by the low `n` bits of `mask`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        debug_assert!(n <= 64);
        let mut s = Self::empty(n);
        let mut m = mask;
        while m != 0 {
            let e = m.trailing_zeros() as usize;
            s.insert(e);
            m &= m - 1;
        }
        s
    }

    /// Inverse of [`ElementSet::from_mask`]; only valid for ground sets of at most 64 elements.
    pub fn to_mask(&self) -> u64 {
        self.iter().fold(0u64, |m, e| m | (1u64 << e))
    }

    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn insert(&mut self, e: usize) {
        self.bits.insert(e);
    }

    pub fn remove(&mut self, e: usize) {
        self.bits.set(e, false);
    }

    pub fn contains(&self, e: usize) -> bool {
        self.bits.contains(e)
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn union_with(&mut self, other: &ElementSet) {
        self.bits.union_with(&other.bits);
    }

    pub fn intersect_with(&mut self, other: &ElementSet) {
        self.bits.intersect_with(&other.bits);
    }

    pub fn difference_with(&mut self, other: &ElementSet) {
        self.bits.difference_with(&other.bits);
    }

    pub fn union(&self, other: &ElementSet) -> ElementSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn intersection(&self, other: &ElementSet) -> ElementSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn difference(&self, other: &ElementSet) -> ElementSet {
        let mut s = self.clone();
        s.difference_with(other);
        s
    }

    pub fn with(&self, e: usize) -> ElementSet {
        let mut s = self.clone();
        s.insert(e);
        s
    }

    pub fn without(&self, e: usize) -> ElementSet {
        let mut s = self.clone();
        s.remove(e);
        s
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn is_disjoint(&self, other: &ElementSet) -> bool {
        self.bits.is_disjoint(&other.bits)
    }

    pub fn clear(&mut self) {
        self.bits.clear();
    }

    /// Sum of `weights` over the members.
    pub fn sum(&self, weights: &[f64]) -> f64 {
        self.iter().map(|e| weights[e]).sum()
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
