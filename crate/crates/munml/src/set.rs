//! Compact state sets, used for generators, valuations and extensions.
//!
//! A `StateSet` always lives relative to a fixed universe size (the number
//! of states of some model); all binary operations expect both operands to
//! share that size.

use fixedbitset::FixedBitSet;

/// A set of states of a single model, identified by dense indices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StateSet {
    bits: FixedBitSet,
}

impl StateSet {
    /// The empty set over a universe of `n` states.
    pub fn empty(n: usize) -> Self {
        StateSet {
            bits: FixedBitSet::with_capacity(n),
        }
    }

    /// The full set over a universe of `n` states.
    pub fn full(n: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(n);
        bits.insert_range(..);
        StateSet { bits }
    }

    pub fn singleton(n: usize, i: usize) -> Self {
        let mut s = Self::empty(n);
        s.insert(i);
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(n: usize, iter: I) -> Self {
        let mut s = Self::empty(n);
        for i in iter {
            s.insert(i);
        }
        s
    }

    /// Size of the universe this set ranges over (not the cardinality).
    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn insert(&mut self, i: usize) {
        self.bits.insert(i);
    }

    pub fn remove(&mut self, i: usize) {
        self.bits.remove(i);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.bits.contains(i)
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.bits.is_full()
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        let mut out = self.clone();
        out.bits.union_with(&other.bits);
        out
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        let mut out = self.clone();
        out.bits.intersect_with(&other.bits);
        out
    }

    /// Complement relative to the universe.
    pub fn complement(&self) -> StateSet {
        let mut out = self.clone();
        out.bits.toggle_range(..);
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    /// Canonical comparison key: cardinality first, then the sorted index
    /// sequence. This is the subset enumeration order used throughout.
    pub fn canonical_key(&self) -> (usize, Vec<usize>) {
        (self.len(), self.iter().collect())
    }
}

impl std::fmt::Debug for StateSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// All subsets of a universe of `n` states, in increasing-cardinality order
/// and lexicographic within each cardinality.
pub fn all_subsets(n: usize) -> Vec<StateSet> {
    assert!(n <= 24, "subset enumeration over {n} states");
    let mut subsets: Vec<StateSet> = (0u32..(1u32 << n))
        .map(|mask| StateSet::from_indices(n, (0..n).filter(|i| mask & (1 << i) != 0)))
        .collect();
    subsets.sort_by_cached_key(|s| s.canonical_key());
    subsets
}
