//! Fixed-width label sets.

use std::fmt;

/// Alphabet cap used unless a caller asks for more.
pub const DEFAULT_ALPHABET_CAP: usize = 16;
/// Hard upper bound on the alphabet cap.
pub const MAX_ALPHABET_CAP: usize = 24;

/// Dense label index inside one problem's alphabet.
pub type LabelId = usize;

/// A set of label ids packed into a bit vector.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct LabelSet(u32);

impl LabelSet {
    pub const EMPTY: LabelSet = LabelSet(0);

    pub fn from_bits(bits: u32) -> Self {
        LabelSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn singleton(id: LabelId) -> Self {
        debug_assert!(id < MAX_ALPHABET_CAP);
        LabelSet(1 << id)
    }

    /// All ids `0..n`.
    pub fn full(n: usize) -> Self {
        if n >= 32 {
            LabelSet(u32::MAX)
        } else {
            LabelSet((1u32 << n) - 1)
        }
    }

    pub fn contains(self, id: LabelId) -> bool {
        id < 32 && self.0 & (1 << id) != 0
    }

    pub fn insert(&mut self, id: LabelId) {
        self.0 |= 1 << id;
    }

    pub fn with(self, id: LabelId) -> Self {
        LabelSet(self.0 | (1 << id))
    }

    pub fn union(self, other: LabelSet) -> Self {
        LabelSet(self.0 | other.0)
    }

    pub fn intersection(self, other: LabelSet) -> Self {
        LabelSet(self.0 & other.0)
    }

    pub fn intersects(self, other: LabelSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_subset(self, other: LabelSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Member ids in ascending order.
    pub fn iter(self) -> impl Iterator<Item = LabelId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let id = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(id)
            }
        })
    }

    /// Image of the set under a label map.
    pub fn map(self, f: &[LabelId]) -> LabelSet {
        self.iter().fold(LabelSet::EMPTY, |acc, id| acc.with(f[id]))
    }

    fn sort_key(self) -> (usize, Vec<LabelId>) {
        (self.len(), self.iter().collect())
    }
}

/// Canonical order on label sets: smaller sets first, then lexicographic
/// on the ascending member list.
impl Ord for LabelSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for LabelSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<LabelId> for LabelSet {
    fn from_iter<I: IntoIterator<Item = LabelId>>(iter: I) -> Self {
        iter.into_iter().fold(LabelSet::EMPTY, |acc, id| acc.with(id))
    }
}

/// A plain multiset of labels, stored as a sorted id list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Word(Vec<LabelId>);

impl Word {
    pub fn new(mut ids: Vec<LabelId>) -> Self {
        ids.sort_unstable();
        Word(ids)
    }

    pub fn ids(&self) -> &[LabelId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn support(&self) -> LabelSet {
        self.0.iter().copied().collect()
    }

    /// Copy of the word with one more occurrence of `id`.
    pub fn plus(&self, id: LabelId) -> Word {
        let pos = self.0.partition_point(|&x| x <= id);
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.extend_from_slice(&self.0[..pos]);
        v.push(id);
        v.extend_from_slice(&self.0[pos..]);
        Word(v)
    }

    /// `(label, multiplicity)` pairs in ascending label order.
    pub fn counts(&self) -> Vec<(LabelId, u32)> {
        let mut out: Vec<(LabelId, u32)> = Vec::new();
        for &id in &self.0 {
            match out.last_mut() {
                Some((last, c)) if *last == id => *c += 1,
                _ => out.push((id, 1)),
            }
        }
        out
    }

    pub fn map(&self, f: &[LabelId]) -> Word {
        Word::new(self.0.iter().map(|&id| f[id]).collect())
    }
}

/// Calls `visit` with every multiset of size `k` drawn from `0..n`, as a
/// non-decreasing index vector.
pub fn for_each_multiset(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            visit(cur);
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, k, i, cur, visit);
            cur.pop();
        }
    }
    if n == 0 && k > 0 {
        return;
    }
    let mut cur = Vec::with_capacity(k);
    rec(n, k, 0, &mut cur, &mut visit);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_basics() {
        let s: LabelSet = [0, 3, 5].into_iter().collect();
        assert_eq!(s.len(), 3);
        assert!(s.contains(3) && !s.contains(1));
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 3, 5]);
        assert!(LabelSet::singleton(3).is_subset(s));
        assert_eq!(s.map(&[1, 1, 1, 1, 1, 1]), LabelSet::singleton(1));
    }

    #[test]
    fn canonical_order_puts_small_sets_first() {
        let a: LabelSet = [0, 3].into_iter().collect();
        let b: LabelSet = [1, 2, 3].into_iter().collect();
        let c = LabelSet::singleton(2);
        let mut v = vec![b, a, c];
        v.sort();
        assert_eq!(v, vec![c, a, b]);
    }

    #[test]
    fn word_plus_keeps_sorted() {
        let w = Word::new(vec![2, 0, 2]);
        assert_eq!(w.plus(1).ids(), &[0, 1, 2, 2]);
        assert_eq!(w.counts(), vec![(0, 1), (2, 2)]);
    }

    #[test]
    fn multiset_count() {
        let mut n = 0;
        for_each_multiset(4, 3, |_| n += 1);
        assert_eq!(n, 20);
    }
}
