use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut};

/// Number of bit positions in an input word.
pub const POSITIONS: usize = 16;

/// Sixteen vertical bit sums. `counts[p]` is the number of words whose
/// `p`-th least significant bit is set.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PositionalCounts(pub [u64; POSITIONS]);

impl PositionalCounts {
    pub const fn zero() -> Self {
        PositionalCounts([0; POSITIONS])
    }

    pub fn as_array(&self) -> &[u64; POSITIONS] {
        &self.0
    }

    /// Horizontal population count of the whole stream.
    pub fn total_bits(&self) -> u64 {
        self.0.iter().sum()
    }

    /// Adds the bits of a single word.
    #[inline]
    pub fn add_word(&mut self, word: u16) {
        for (p, c) in self.0.iter_mut().enumerate() {
            *c += u64::from((word >> p) & 1);
        }
    }

    /// Adds `weight` for each set bit of `word`.
    #[inline]
    pub fn add_word_weighted(&mut self, word: u16, weight: u64) {
        for (p, c) in self.0.iter_mut().enumerate() {
            *c += weight * u64::from((word >> p) & 1);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().copied()
    }
}

/// Field-wise sum of two count vectors. Together with chunking this is the
/// fork-join contract: counting `a ++ b` equals merging the counts of `a`
/// and `b`.
pub fn merge_counts(a: PositionalCounts, b: PositionalCounts) -> PositionalCounts {
    a + b
}

impl Add for PositionalCounts {
    type Output = PositionalCounts;

    fn add(mut self, rhs: PositionalCounts) -> PositionalCounts {
        self += rhs;
        self
    }
}

impl AddAssign for PositionalCounts {
    fn add_assign(&mut self, rhs: PositionalCounts) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
    }
}

impl std::iter::Sum for PositionalCounts {
    fn sum<I: Iterator<Item = PositionalCounts>>(iter: I) -> Self {
        iter.fold(PositionalCounts::zero(), Add::add)
    }
}

impl Index<usize> for PositionalCounts {
    type Output = u64;

    fn index(&self, p: usize) -> &u64 {
        &self.0[p]
    }
}

impl IndexMut<usize> for PositionalCounts {
    fn index_mut(&mut self, p: usize) -> &mut u64 {
        &mut self.0[p]
    }
}

impl From<[u64; POSITIONS]> for PositionalCounts {
    fn from(counts: [u64; POSITIONS]) -> Self {
        PositionalCounts(counts)
    }
}

impl fmt::Debug for PositionalCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_identity_and_commutativity() {
        let mut x = PositionalCounts::zero();
        x.add_word(0xbeef);
        x.add_word(0x0101);
        let mut y = PositionalCounts::zero();
        y.add_word(0xffff);
        assert_eq!(merge_counts(PositionalCounts::zero(), x), x);
        assert_eq!(merge_counts(x, y), merge_counts(y, x));
        assert_eq!(merge_counts(x, y).total_bits(), x.total_bits() + y.total_bits());
    }

    #[test]
    fn weighted_add() {
        let mut c = PositionalCounts::zero();
        c.add_word_weighted(0x8001, 4);
        assert_eq!(c[0], 4);
        assert_eq!(c[15], 4);
        assert_eq!(c.total_bits(), 8);
    }
}
