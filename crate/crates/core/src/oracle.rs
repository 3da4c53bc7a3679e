use crate::counts::{PositionalCounts, POSITIONS};

/// Ground truth: a plain double loop over words and bit positions.
///
/// Deliberately naive; every kernel is tested against this.
pub fn oracle_pospopcnt(words: &[u16]) -> PositionalCounts {
    let mut counts = PositionalCounts::zero();
    for &w in words {
        for p in 0..POSITIONS {
            if (w >> p) & 1 == 1 {
                counts[p] += 1;
            }
        }
    }
    counts
}
