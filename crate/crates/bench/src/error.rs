use pospopcnt::{KernelKind, PositionalCounts};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BenchError {
    #[error("reps must be at least 1")]
    NoReps,

    #[error(transparent)]
    Kernel(#[from] pospopcnt::Error),

    /// The kernel disagreed with the oracle; the run is discarded.
    #[error("{kernel} disagrees with the oracle on {len_words} words: got {got:?}, expected {expected:?}")]
    Mismatch {
        kernel: KernelKind,
        len_words: usize,
        got: PositionalCounts,
        expected: PositionalCounts,
    },
}
