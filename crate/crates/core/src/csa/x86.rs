//! AVX2 and AVX-512 register types for the circuit driver.
//!
//! These types are crate-private: their methods execute vector
//! instructions unconditionally, so they are only instantiated inside the
//! `#[target_feature]` entry points below, which callers reach after
//! runtime feature detection.

use std::arch::x86_64::*;

use crate::counts::PositionalCounts;
use crate::lanes::{sealed, LaneVector};

#[derive(Clone, Copy)]
pub(crate) struct Avx2(__m256i);

impl sealed::Sealed for Avx2 {}

impl LaneVector for Avx2 {
    const BITS: usize = 256;

    #[inline(always)]
    fn zero() -> Self {
        Avx2(unsafe { _mm256_setzero_si256() })
    }

    #[inline(always)]
    fn load(words: &[u16]) -> Self {
        let words = &words[..Self::LANES];
        Avx2(unsafe { _mm256_loadu_si256(words.as_ptr().cast()) })
    }

    #[inline(always)]
    fn store(self, out: &mut [u16]) {
        let out = &mut out[..Self::LANES];
        unsafe { _mm256_storeu_si256(out.as_mut_ptr().cast(), self.0) }
    }

    #[inline(always)]
    fn and(self, other: Self) -> Self {
        Avx2(unsafe { _mm256_and_si256(self.0, other.0) })
    }

    #[inline(always)]
    fn or(self, other: Self) -> Self {
        Avx2(unsafe { _mm256_or_si256(self.0, other.0) })
    }

    #[inline(always)]
    fn xor(self, other: Self) -> Self {
        Avx2(unsafe { _mm256_xor_si256(self.0, other.0) })
    }

    #[inline(always)]
    fn lane_lsb(self) -> Self {
        Avx2(unsafe { _mm256_and_si256(self.0, _mm256_set1_epi16(1)) })
    }

    #[inline(always)]
    fn lane_add(self, other: Self) -> Self {
        Avx2(unsafe { _mm256_add_epi16(self.0, other.0) })
    }

    #[inline(always)]
    fn lane_shr1(self) -> Self {
        Avx2(unsafe { _mm256_srli_epi16::<1>(self.0) })
    }
}

#[derive(Clone, Copy)]
pub(crate) struct Avx512(__m512i);

impl sealed::Sealed for Avx512 {}

impl LaneVector for Avx512 {
    const BITS: usize = 512;

    #[inline(always)]
    fn zero() -> Self {
        Avx512(unsafe { _mm512_setzero_si512() })
    }

    #[inline(always)]
    fn load(words: &[u16]) -> Self {
        let words = &words[..Self::LANES];
        Avx512(unsafe { _mm512_loadu_si512(words.as_ptr().cast()) })
    }

    #[inline(always)]
    fn store(self, out: &mut [u16]) {
        let out = &mut out[..Self::LANES];
        unsafe { _mm512_storeu_si512(out.as_mut_ptr().cast(), self.0) }
    }

    #[inline(always)]
    fn and(self, other: Self) -> Self {
        Avx512(unsafe { _mm512_and_si512(self.0, other.0) })
    }

    #[inline(always)]
    fn or(self, other: Self) -> Self {
        Avx512(unsafe { _mm512_or_si512(self.0, other.0) })
    }

    #[inline(always)]
    fn xor(self, other: Self) -> Self {
        Avx512(unsafe { _mm512_xor_si512(self.0, other.0) })
    }

    /// One ternary-logic instruction per output bit plane: 0xE8 is the
    /// majority function (minterms 3, 5, 6, 7), 0x96 the three-way xor
    /// (minterms 1, 2, 4, 7).
    #[inline(always)]
    fn csa(a: Self, b: Self, c: Self) -> (Self, Self) {
        unsafe {
            (
                Avx512(_mm512_ternarylogic_epi32::<0xE8>(a.0, b.0, c.0)),
                Avx512(_mm512_ternarylogic_epi32::<0x96>(a.0, b.0, c.0)),
            )
        }
    }

    #[inline(always)]
    fn lane_lsb(self) -> Self {
        Avx512(unsafe { _mm512_and_si512(self.0, _mm512_set1_epi16(1)) })
    }

    #[inline(always)]
    fn lane_add(self, other: Self) -> Self {
        Avx512(unsafe { _mm512_add_epi16(self.0, other.0) })
    }

    #[inline(always)]
    fn lane_shr1(self) -> Self {
        Avx512(unsafe { _mm512_srli_epi16::<1>(self.0) })
    }
}

#[target_feature(enable = "avx2")]
pub(crate) unsafe fn run_avx2<const N: usize>(words: &[u16], threshold: u32) -> PositionalCounts {
    super::run::<Avx2, N>(words, threshold)
}

#[target_feature(enable = "avx512f,avx512bw")]
pub(crate) unsafe fn run_avx512<const N: usize>(words: &[u16], threshold: u32) -> PositionalCounts {
    super::run::<Avx512, N>(words, threshold)
}

/// Exercises the accelerated adders directly; used by tests to compare
/// the ternary-logic form against the portable five-operation form.
#[cfg(test)]
#[target_feature(enable = "avx512f,avx512bw")]
pub(crate) unsafe fn csa_avx512_words(a: &[u16], b: &[u16], c: &[u16]) -> (Vec<u16>, Vec<u16>) {
    let (h, l) = Avx512::csa(Avx512::load(a), Avx512::load(b), Avx512::load(c));
    (h.to_lanes(), l.to_lanes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lanes::Wide512;

    #[test]
    fn ternary_logic_csa_matches_portable() {
        if !crate::config::has_avx512() {
            println!("skipped: no avx512");
            return;
        }
        let mut state = 0x9e37_79b9_7f4a_7c15u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 48) as u16
        };
        for _ in 0..200 {
            let a: Vec<u16> = (0..32).map(|_| next()).collect();
            let b: Vec<u16> = (0..32).map(|_| next()).collect();
            let c: Vec<u16> = (0..32).map(|_| next()).collect();
            let (h, l) = unsafe { csa_avx512_words(&a, &b, &c) };
            let (ph, pl) = Wide512::csa(Wide512::load(&a), Wide512::load(&b), Wide512::load(&c));
            assert_eq!(h, ph.to_lanes());
            assert_eq!(l, pl.to_lanes());
        }
    }
}
