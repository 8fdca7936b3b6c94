use std::fmt;

use itertools::Itertools;

use crate::error::Error;
use crate::Result;

/// Sorted set of distinct row indices.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct IndexSet(Vec<usize>);

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.iter().map(|i| i.to_string()).join(","))
    }
}

impl IndexSet {
    pub fn empty() -> Self {
        IndexSet(Vec::new())
    }

    /// Build from arbitrary indices; rejects duplicates and entries >= `m`.
    pub fn new(mut indices: Vec<usize>, m: usize) -> Result<Self> {
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParam("duplicate index in set".into()));
        }
        if indices.last().is_some_and(|&i| i >= m) {
            return Err(Error::OutOfRange(format!("index set exceeds row count {m}")));
        }
        Ok(IndexSet(indices))
    }

    /// Build from indices already known to be strictly increasing and in range.
    pub fn from_sorted(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        IndexSet(indices)
    }

    pub fn singleton(i: usize) -> Self {
        IndexSet(vec![i])
    }

    pub fn full(m: usize) -> Self {
        IndexSet((0..m).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn is_subset_of(&self, other: &IndexSet) -> bool {
        self.iter().all(|i| other.contains(i))
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        let mut v: Vec<usize> = self.0.iter().chain(other.0.iter()).copied().collect();
        v.sort_unstable();
        v.dedup();
        IndexSet(v)
    }

    pub fn intersection(&self, other: &IndexSet) -> IndexSet {
        IndexSet(self.iter().filter(|&i| other.contains(i)).collect())
    }

    pub fn complement(&self, m: usize) -> IndexSet {
        IndexSet((0..m).filter(|&i| !self.contains(i)).collect())
    }

    pub fn inserted(&self, i: usize) -> IndexSet {
        if self.contains(i) {
            return self.clone();
        }
        let mut v = self.0.clone();
        v.push(i);
        v.sort_unstable();
        IndexSet(v)
    }

    /// All k-subsets of `{0, .., m-1}`.
    pub fn subsets_of_size(m: usize, k: usize) -> impl Iterator<Item = IndexSet> {
        (0..m).combinations(k).map(IndexSet)
    }

    /// All k-subsets of this set's elements.
    pub fn subsets_within(&self, k: usize) -> impl Iterator<Item = IndexSet> + '_ {
        self.0.iter().copied().combinations(k).map(IndexSet)
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut v: Vec<usize> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        IndexSet(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn new_sorts_and_validates() {
        let s = IndexSet::new(vec![3, 1], 5).unwrap();
        assert_eq!(s.as_slice(), &[1, 3]);
        assert!(IndexSet::new(vec![1, 1], 5).is_err());
        assert!(IndexSet::new(vec![5], 5).is_err());
    }

    #[test]
    fn subset_enumeration_counts() {
        assert_eq!(IndexSet::subsets_of_size(5, 2).count(), 10);
        assert_eq!(IndexSet::subsets_of_size(4, 0).count(), 1);
    }

    #[test]
    fn set_algebra() {
        let a = IndexSet::from_sorted(vec![0, 2]);
        let b = IndexSet::from_sorted(vec![2, 3]);
        assert_eq!(a.union(&b).as_slice(), &[0, 2, 3]);
        assert_eq!(a.intersection(&b).as_slice(), &[2]);
        assert_eq!(a.complement(4).as_slice(), &[1, 3]);
        assert!(a.intersection(&b).is_subset_of(&b));
    }
}
