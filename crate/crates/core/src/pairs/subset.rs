use std::fmt;

/// A set of divisor indices, stored as a bitmask (at most 64 divisors).
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Subset(u64);

pub const MAX_DIVISORS: usize = 64;

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u64) -> Self {
        Subset(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(i: usize) -> Self {
        assert!(i < MAX_DIVISORS, "divisor index {i} out of range");
        Subset(1 << i)
    }

    /// The set `{0, …, n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_DIVISORS);
        if n == MAX_DIVISORS {
            Subset(u64::MAX)
        } else {
            Subset((1u64 << n) - 1)
        }
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_DIVISORS && self.0 & (1 << i) != 0
    }

    pub fn with(self, i: usize) -> Self {
        self | Subset::singleton(i)
    }

    pub fn without(self, i: usize) -> Self {
        Subset(self.0 & !Subset::singleton(i).0)
    }

    pub fn union(self, other: Subset) -> Self {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Self {
        Subset(self.0 & other.0)
    }

    pub fn difference(self, other: Subset) -> Self {
        Subset(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    /// Largest element plus one, or 0 for the empty set.
    pub fn bound(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..MAX_DIVISORS).filter(move |i| bits & (1 << i) != 0)
    }

    /// All subsets of `self`, in increasing bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = Subset> {
        let mask = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == mask {
                None
            } else {
                Some((cur.wrapping_sub(mask)) & mask)
            };
            Some(Subset(cur))
        })
    }

    /// Re-indexes `self` after deleting the positions in `removed`, shifting later indices down.
    pub fn compress(self, removed: Subset) -> Subset {
        let mut out = 0u64;
        let mut k = 0;
        for i in 0..self.bound().max(removed.bound()) {
            if removed.contains(i) {
                continue;
            }
            if self.contains(i) {
                out |= 1 << k;
            }
            k += 1;
        }
        Subset(out)
    }

    /// Inverse of [`compress`](Self::compress) for sets disjoint from `removed`.
    pub fn expand(self, removed: Subset) -> Subset {
        let mut out = 0u64;
        let mut i = 0;
        for k in 0..self.bound() {
            while removed.contains(i) {
                i += 1;
            }
            if self.contains(k) {
                out |= 1 << i;
            }
            i += 1;
        }
        Subset(out)
    }
}

impl std::ops::BitOr for Subset {
    type Output = Subset;
    fn bitor(self, rhs: Subset) -> Subset {
        self.union(rhs)
    }
}

impl FromIterator<usize> for Subset {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(Subset::EMPTY, Subset::with)
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_enumerates_power_set() {
        let s: Subset = [0, 2, 5].into_iter().collect();
        let all: Vec<Subset> = s.subsets().collect();
        assert_eq!(all.len(), 8);
        assert!(all.iter().all(|t| t.is_subset_of(s)));
        assert_eq!(Subset::EMPTY.subsets().count(), 1);
    }

    #[test]
    fn compress_expand() {
        let removed: Subset = [1, 3].into_iter().collect();
        let s: Subset = [0, 2, 4].into_iter().collect();
        let c = s.compress(removed);
        assert_eq!(c, [0, 1, 2].into_iter().collect());
        assert_eq!(c.expand(removed), s);
    }
}
