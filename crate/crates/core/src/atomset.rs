//! Growable bitset of atom indices.

use std::fmt;

/// A set of atom indices stored as 64-bit words.
///
/// Trailing zero words are trimmed so that equal sets compare equal
/// regardless of how they were built.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomSet {
    words: Vec<u64>,
}

impl AtomSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        let mut words = vec![u64::MAX; n / 64];
        if n % 64 != 0 {
            words.push((1u64 << (n % 64)) - 1);
        }
        let mut s = AtomSet { words };
        s.trim();
        s
    }

    pub fn singleton(i: usize) -> Self {
        let mut s = Self::new();
        s.insert(i);
        s
    }

    /// Builds a set from the low `n` bits of `mask`.
    pub fn from_mask(mask: u64) -> Self {
        let mut s = AtomSet { words: vec![mask] };
        s.trim();
        s
    }

    /// Low 64 bits; only meaningful when every member is below 64.
    pub fn to_mask(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn insert(&mut self, i: usize) {
        let (w, b) = (i / 64, i % 64);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1 << b;
    }

    pub fn remove(&mut self, i: usize) {
        let (w, b) = (i / 64, i % 64);
        if w < self.words.len() {
            self.words[w] &= !(1 << b);
            self.trim();
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        let (w, b) = (i / 64, i % 64);
        self.words.get(w).is_some_and(|x| x & (1 << b) != 0)
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Smallest member.
    pub fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    /// One past the largest member.
    pub fn bound(&self) -> usize {
        match self.words.last() {
            None => 0,
            Some(w) => (self.words.len() - 1) * 64 + (64 - w.leading_zeros() as usize),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * 64 + b)
            })
        })
    }

    pub fn union(&self, other: &Self) -> Self {
        let n = self.words.len().max(other.words.len());
        let words = (0..n)
            .map(|i| self.word(i) | other.word(i))
            .collect();
        AtomSet { words }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let n = self.words.len().min(other.words.len());
        let mut s = AtomSet {
            words: (0..n).map(|i| self.word(i) & other.word(i)).collect(),
        };
        s.trim();
        s
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut s = AtomSet {
            words: (0..self.words.len())
                .map(|i| self.word(i) & !other.word(i))
                .collect(),
        };
        s.trim();
        s
    }

    pub fn symmetric_difference(&self, other: &Self) -> Self {
        let n = self.words.len().max(other.words.len());
        let mut s = AtomSet {
            words: (0..n).map(|i| self.word(i) ^ other.word(i)).collect(),
        };
        s.trim();
        s
    }

    /// Complement relative to `{0, .., n-1}`.
    pub fn complement(&self, n: usize) -> Self {
        AtomSet::full(n).difference(self)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, w)| w & !other.word(i) == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.intersection(other).is_empty()
    }

    fn word(&self, i: usize) -> u64 {
        self.words.get(i).copied().unwrap_or(0)
    }
}

impl FromIterator<usize> for AtomSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = AtomSet::new();
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl fmt::Debug for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn full_and_complement() {
        let f = AtomSet::full(70);
        assert_eq!(f.len(), 70);
        assert_eq!(f.bound(), 70);
        let s: AtomSet = [0, 65].into_iter().collect();
        let c = s.complement(70);
        assert_eq!(c.len(), 68);
        assert!(!c.contains(65));
        assert_eq!(AtomSet::full(0), AtomSet::new());
    }

    #[test]
    fn trimming_keeps_equality_structural() {
        let mut a: AtomSet = [1, 100].into_iter().collect();
        a.remove(100);
        assert_eq!(a, AtomSet::singleton(1));
        assert_eq!(a.first(), Some(1));
    }

    proptest! {
        #[test]
        fn set_ops_agree_with_btreeset(
            a in prop::collection::btree_set(0usize..130, 0..20),
            b in prop::collection::btree_set(0usize..130, 0..20),
        ) {
            let sa: AtomSet = a.iter().copied().collect();
            let sb: AtomSet = b.iter().copied().collect();
            let inter: Vec<_> = a.intersection(&b).copied().collect();
            let uni: Vec<_> = a.union(&b).copied().collect();
            let sym: Vec<_> = a.symmetric_difference(&b).copied().collect();
            prop_assert_eq!(sa.intersection(&sb).iter().collect::<Vec<_>>(), inter);
            prop_assert_eq!(sa.union(&sb).iter().collect::<Vec<_>>(), uni);
            prop_assert_eq!(sa.symmetric_difference(&sb).iter().collect::<Vec<_>>(), sym);
            prop_assert_eq!(sa.is_subset(&sb), a.is_subset(&b));
        }
    }
}
