//! Dense multisets over a fixed, indexed universe of locations.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Index of a control location inside a [`Protocol`](super::Protocol).
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LocId(pub u16);

/// Index of a register datum inside a [`Protocol`](super::Protocol).
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DatumId(pub u16);

impl LocId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl DatumId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A set of locations, stored as a bitmask. Protocols are limited to
/// [`LocSet::CAPACITY`] locations.
#[derive(Copy, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LocSet(u64);

impl LocSet {
    pub const CAPACITY: usize = 64;

    pub const fn empty() -> Self {
        LocSet(0)
    }

    pub fn singleton(q: LocId) -> Self {
        LocSet(1 << q.0)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn from_bits(bits: u64) -> Self {
        LocSet(bits)
    }

    #[inline]
    pub fn contains(self, q: LocId) -> bool {
        self.0 & (1 << q.0) != 0
    }

    #[inline]
    pub fn with(self, q: LocId) -> Self {
        LocSet(self.0 | (1 << q.0))
    }

    #[inline]
    pub fn without(self, q: LocId) -> Self {
        LocSet(self.0 & !(1 << q.0))
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = LocId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let q = bits.trailing_zeros() as u16;
            bits &= bits - 1;
            Some(LocId(q))
        })
    }
}

impl fmt::Debug for LocSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|q| q.0)).finish()
    }
}

impl FromIterator<LocId> for LocSet {
    fn from_iter<I: IntoIterator<Item = LocId>>(iter: I) -> Self {
        iter.into_iter().fold(LocSet::empty(), LocSet::with)
    }
}

/// A multiset of locations: `counts[q]` processes sit in location `q`.
///
/// The universe size is fixed at construction; two multisets are only
/// comparable when their universes agree.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Multiset {
    counts: Box<[u32]>,
}

impl Multiset {
    /// The empty multiset over `universe` locations.
    pub fn empty(universe: usize) -> Self {
        Multiset {
            counts: vec![0; universe].into_boxed_slice(),
        }
    }

    /// `q^n` over `universe` locations.
    pub fn power(universe: usize, q: LocId, n: u32) -> Self {
        let mut m = Self::empty(universe);
        m.counts[q.index()] = n;
        m
    }

    pub fn from_counts(counts: Vec<u32>) -> Self {
        Multiset {
            counts: counts.into_boxed_slice(),
        }
    }

    pub fn universe(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    #[inline]
    pub fn count(&self, q: LocId) -> u32 {
        self.counts[q.index()]
    }

    /// Total number of elements.
    pub fn cardinality(&self) -> u64 {
        self.counts.iter().map(|&c| u64::from(c)).sum()
    }

    pub fn support(&self) -> LocSet {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, _)| LocId(i as u16))
            .collect()
    }

    /// Pairs `(q, count)` for every location in the support, in index order.
    pub fn iter(&self) -> impl Iterator<Item = (LocId, u32)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (LocId(i as u16), c))
    }

    /// Multiset inclusion `self ⊆ other`.
    pub fn is_included_in(&self, other: &Multiset) -> bool {
        debug_assert_eq!(self.universe(), other.universe());
        self.counts.iter().zip(other.counts.iter()).all(|(a, b)| a <= b)
    }

    /// Partial order induced by inclusion.
    pub fn inclusion_cmp(&self, other: &Multiset) -> Option<Ordering> {
        let (mut le, mut ge) = (true, true);
        for (a, b) in self.counts.iter().zip(other.counts.iter()) {
            le &= a <= b;
            ge &= a >= b;
        }
        match (le, ge) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => None,
        }
    }

    /// Multiset union (pointwise sum).
    ///
    /// Panics if a count overflows `u32`.
    pub fn union(&self, other: &Multiset) -> Multiset {
        debug_assert_eq!(self.universe(), other.universe());
        let counts = self
            .counts
            .iter()
            .zip(other.counts.iter())
            .map(|(a, b)| a.checked_add(*b).expect("multiset count overflow"))
            .collect();
        Multiset { counts }
    }

    /// Multiset difference `self ⊖ other`, defined only when `other ⊆ self`.
    pub fn difference(&self, other: &Multiset) -> Option<Multiset> {
        debug_assert_eq!(self.universe(), other.universe());
        let counts = self
            .counts
            .iter()
            .zip(other.counts.iter())
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Box<[u32]>>>()?;
        Some(Multiset { counts })
    }

    /// Adds `n` copies of `q` in place.
    pub fn add(&mut self, q: LocId, n: u32) {
        let c = &mut self.counts[q.index()];
        *c = c.checked_add(n).expect("multiset count overflow");
    }

    /// Removes one copy of `q` in place; returns `false` (and leaves `self`
    /// untouched) if `q` is absent.
    pub fn remove_one(&mut self, q: LocId) -> bool {
        let c = &mut self.counts[q.index()];
        if *c == 0 {
            return false;
        }
        *c -= 1;
        true
    }

    /// `self ⊖ from ⊔ to`, or `None` when `from` is absent.
    pub fn moved(&self, from: LocId, to: LocId) -> Option<Multiset> {
        if self.count(from) == 0 {
            return None;
        }
        let mut m = self.clone();
        m.counts[from.index()] -= 1;
        m.counts[to.index()] += 1;
        Some(m)
    }

    pub fn max_count(&self) -> u32 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    /// Every multiset of cardinality exactly `size` over `universe` locations,
    /// in lexicographic order of the count vectors.
    pub fn all_of_size(universe: usize, size: u32) -> Vec<Multiset> {
        fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Multiset>) {
            if pos + 1 == cur.len() {
                cur[pos] = left;
                out.push(Multiset::from_counts(cur.clone()));
                return;
            }
            for c in 0..=left {
                cur[pos] = c;
                rec(pos + 1, left - c, cur, out);
            }
        }
        let mut out = Vec::new();
        if universe == 0 {
            if size == 0 {
                out.push(Multiset::empty(0));
            }
            return out;
        }
        rec(0, size, &mut vec![0; universe], &mut out);
        out
    }
}

impl fmt::Debug for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.iter().map(|(q, c)| (q.0, c))).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(c: &[u32]) -> Multiset {
        Multiset::from_counts(c.to_vec())
    }

    #[test]
    fn union_and_difference() {
        let a = ms(&[1, 0, 2]);
        let b = ms(&[0, 3, 1]);
        assert_eq!(a.union(&b), ms(&[1, 3, 3]));
        assert_eq!(a.union(&b).difference(&b), Some(a.clone()));
        assert_eq!(a.difference(&b), None);
        assert_eq!(a.union(&b).cardinality(), 7);
    }

    #[test]
    fn support_and_inclusion() {
        let a = ms(&[1, 0, 2]);
        assert_eq!(a.support().iter().map(|q| q.0).collect::<Vec<_>>(), vec![0, 2]);
        assert!(a.is_included_in(&ms(&[1, 1, 2])));
        assert_eq!(a.inclusion_cmp(&ms(&[0, 1, 2])), None);
        assert_eq!(a.inclusion_cmp(&ms(&[1, 0, 1])), Some(Ordering::Greater));
    }

    #[test]
    fn enumeration_counts() {
        // C(k + n - 1, n - 1)
        assert_eq!(Multiset::all_of_size(3, 2).len(), 6);
        assert_eq!(Multiset::all_of_size(4, 3).len(), 20);
        assert_eq!(Multiset::all_of_size(2, 0).len(), 1);
        assert!(Multiset::all_of_size(4, 3).iter().all(|m| m.cardinality() == 3));
    }

    #[test]
    fn moved_requires_presence() {
        let a = ms(&[1, 0]);
        assert_eq!(a.moved(LocId(0), LocId(1)), Some(ms(&[0, 1])));
        assert_eq!(a.moved(LocId(1), LocId(0)), None);
    }
}
