//! Call-counting register wrapper for checking circuit cost.
//!
//! `Counted<V>` behaves exactly like `V` but bumps a thread-local counter
//! on every carry-save addition, so running any generic routine over it
//! reports how many adders that routine evaluated. Production paths never
//! use it.

use std::cell::Cell;

use crate::lanes::{sealed, LaneVector};

thread_local! {
    static CSA_CALLS: Cell<u64> = const { Cell::new(0) };
}

pub fn reset_csa_calls() {
    CSA_CALLS.with(|c| c.set(0));
}

/// Adder evaluations on this thread since the last reset.
pub fn csa_calls() -> u64 {
    CSA_CALLS.with(|c| c.get())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Counted<V>(pub V);

impl<V: LaneVector> sealed::Sealed for Counted<V> {}

impl<V: LaneVector> LaneVector for Counted<V> {
    const BITS: usize = V::BITS;

    fn zero() -> Self {
        Counted(V::zero())
    }

    fn load(words: &[u16]) -> Self {
        Counted(V::load(words))
    }

    fn store(self, out: &mut [u16]) {
        self.0.store(out)
    }

    fn and(self, other: Self) -> Self {
        Counted(self.0.and(other.0))
    }

    fn or(self, other: Self) -> Self {
        Counted(self.0.or(other.0))
    }

    fn xor(self, other: Self) -> Self {
        Counted(self.0.xor(other.0))
    }

    fn csa(a: Self, b: Self, c: Self) -> (Self, Self) {
        CSA_CALLS.with(|n| n.set(n.get() + 1));
        let (h, l) = V::csa(a.0, b.0, c.0);
        (Counted(h), Counted(l))
    }

    fn lane_lsb(self) -> Self {
        Counted(self.0.lane_lsb())
    }

    fn lane_add(self, other: Self) -> Self {
        Counted(self.0.lane_add(other.0))
    }

    fn lane_shr1(self) -> Self {
        Counted(self.0.lane_shr1())
    }
}
