//! Byte-blend kernel for short inputs.
//!
//! Words are split into a register of high bytes and a register of low
//! bytes. Eight rounds then harvest the top bit of every byte, add its
//! population count to the position currently sitting in the byte's MSB,
//! and move the next bit up by adding each byte to itself. Round `r`
//! updates positions `15 - r` (high bytes) and `7 - r` (low bytes).

use crate::config::{has_avx2, has_avx512, Backend};
use crate::counts::PositionalCounts;
use crate::scalar::pospopcnt_scalar_basic;

const BYTE_MSB: u64 = 0x8080_8080_8080_8080;
const BYTE_LOW7: u64 = 0x7f7f_7f7f_7f7f_7f7f;
const EVEN_BYTES: u64 = 0x00ff_00ff_00ff_00ff;

/// Blends two registers of four words each into (high bytes, low bytes).
#[inline(always)]
pub fn blend64(d0: u64, d1: u64) -> (u64, u64) {
    let high = ((d0 >> 8) & EVEN_BYTES) | (d1 & !EVEN_BYTES);
    let low = (d0 & EVEN_BYTES) | ((d1 << 8) & !EVEN_BYTES);
    (high, low)
}

/// Population count of the per-byte MSB mask, emulated without a
/// byte-movemask instruction.
#[inline(always)]
pub fn byte_msb_count(x: u64) -> u32 {
    (x & BYTE_MSB).count_ones()
}

/// Byte-wise `x + x`, i.e. every byte shifted left by one modulo 256.
#[inline(always)]
pub fn byte_double(x: u64) -> u64 {
    let y = x & BYTE_LOW7;
    y + y
}

fn load64(w: &[u16]) -> u64 {
    u64::from(w[0]) | u64::from(w[1]) << 16 | u64::from(w[2]) << 32 | u64::from(w[3]) << 48
}

fn run_portable(words: &[u16]) -> PositionalCounts {
    let mut c = [0u64; 16];
    let mut groups = words.chunks_exact(8);
    for g in &mut groups {
        let (mut high, mut low) = blend64(load64(&g[..4]), load64(&g[4..]));
        for r in 0..8 {
            c[15 - r] += u64::from(byte_msb_count(high));
            c[7 - r] += u64::from(byte_msb_count(low));
            high = byte_double(high);
            low = byte_double(low);
        }
    }
    PositionalCounts(c) + pospopcnt_scalar_basic(groups.remainder())
}

#[cfg(target_arch = "x86_64")]
mod x86 {
    use std::arch::x86_64::*;

    use crate::counts::PositionalCounts;
    use crate::scalar::pospopcnt_scalar_basic;

    #[target_feature(enable = "avx2,popcnt")]
    pub(super) unsafe fn run_avx2(words: &[u16]) -> PositionalCounts {
        let mut c = [0u64; 16];
        let lo_mask = _mm256_set1_epi16(0x00ff);
        let mut groups = words.chunks_exact(32);
        for g in &mut groups {
            let d0 = _mm256_loadu_si256(g.as_ptr().cast());
            let d1 = _mm256_loadu_si256(g[16..].as_ptr().cast());
            let mut high = _mm256_blendv_epi8(d1, _mm256_srli_epi16::<8>(d0), lo_mask);
            let mut low = _mm256_blendv_epi8(_mm256_slli_epi16::<8>(d1), d0, lo_mask);
            for r in 0..8 {
                c[15 - r] += u64::from((_mm256_movemask_epi8(high) as u32).count_ones());
                c[7 - r] += u64::from((_mm256_movemask_epi8(low) as u32).count_ones());
                high = _mm256_add_epi8(high, high);
                low = _mm256_add_epi8(low, low);
            }
        }
        PositionalCounts(c) + pospopcnt_scalar_basic(groups.remainder())
    }

    #[target_feature(enable = "avx512f,avx512bw,popcnt")]
    pub(super) unsafe fn run_avx512(words: &[u16]) -> PositionalCounts {
        let mut c = [0u64; 16];
        let lo_mask: __mmask64 = 0x5555_5555_5555_5555;
        let mut groups = words.chunks_exact(64);
        for g in &mut groups {
            let d0 = _mm512_loadu_si512(g.as_ptr().cast());
            let d1 = _mm512_loadu_si512(g[32..].as_ptr().cast());
            let mut high = _mm512_mask_blend_epi8(lo_mask, d1, _mm512_srli_epi16::<8>(d0));
            let mut low = _mm512_mask_blend_epi8(lo_mask, _mm512_slli_epi16::<8>(d1), d0);
            for r in 0..8 {
                c[15 - r] += u64::from(_mm512_movepi8_mask(high).count_ones());
                c[7 - r] += u64::from(_mm512_movepi8_mask(low).count_ones());
                high = _mm512_add_epi8(high, high);
                low = _mm512_add_epi8(low, low);
            }
        }
        PositionalCounts(c) + pospopcnt_scalar_basic(groups.remainder())
    }
}

/// Byte-blend positional population count on the best available backend.
pub fn pospopcnt_byteblend(words: &[u16]) -> PositionalCounts {
    pospopcnt_byteblend_on(words, Backend::Auto)
}

/// Byte-blend on a specific backend. Falls back to the portable form when
/// the requested instruction set is not present.
pub fn pospopcnt_byteblend_on(words: &[u16], backend: Backend) -> PositionalCounts {
    #[cfg(target_arch = "x86_64")]
    {
        let avx512 = matches!(backend, Backend::Auto | Backend::Avx512) && has_avx512();
        let avx2 = matches!(backend, Backend::Auto | Backend::Avx2 | Backend::Avx512) && has_avx2();
        if avx512 {
            // SAFETY: feature presence checked above.
            return unsafe { x86::run_avx512(words) };
        }
        if avx2 {
            return unsafe { x86::run_avx2(words) };
        }
    }
    #[cfg(not(target_arch = "x86_64"))]
    let _ = (backend, has_avx2, has_avx512);
    run_portable(words)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_pospopcnt;

    const BACKENDS: [Backend; 3] = [Backend::Portable, Backend::Avx2, Backend::Avx512];

    #[test]
    fn single_msb_word() {
        for b in BACKENDS {
            let c = pospopcnt_byteblend_on(&[0x8000; 1], b);
            assert_eq!(c[15], 1);
            assert_eq!(c.total_bits(), 1);
        }
        // A full group so the blend path itself is taken.
        let mut words = [0u16; 64];
        words[0] = 0x8000;
        for b in BACKENDS {
            let c = pospopcnt_byteblend_on(&words, b);
            assert_eq!(c[15], 1);
            assert_eq!(c.total_bits(), 1);
        }
    }

    #[test]
    fn round_trace() {
        // After r doublings, byte b holds (b << r) mod 256 and its MSB is
        // original bit 7 - r.
        for byte in 0..=255u64 {
            let mut x = byte * 0x0101_0101_0101_0101;
            for r in 0..8 {
                assert_eq!(x & 0xff, (byte << r) & 0xff);
                let expect = ((byte >> (7 - r)) & 1) as u32 * 8;
                assert_eq!(byte_msb_count(x), expect);
                x = byte_double(x);
            }
        }
    }

    #[test]
    fn blend_partitions_bytes() {
        let (h, l) = blend64(0x1122_3344_5566_7788, 0x99aa_bbcc_ddee_ff00);
        let mut hb: Vec<u8> = h.to_le_bytes().to_vec();
        let mut lb: Vec<u8> = l.to_le_bytes().to_vec();
        hb.sort();
        lb.sort();
        assert_eq!(hb, vec![0x11, 0x33, 0x55, 0x77, 0x99, 0xbb, 0xdd, 0xff]);
        assert_eq!(lb, vec![0x00, 0x22, 0x44, 0x66, 0x88, 0xaa, 0xcc, 0xee]);
    }

    #[test]
    fn matches_oracle() {
        let words: Vec<u16> = (0..512u32).map(|i| (i.wrapping_mul(0x2545_f491) >> 9) as u16).collect();
        for b in BACKENDS {
            assert_eq!(pospopcnt_byteblend_on(&[], b), PositionalCounts::zero());
            for len in [512, 511, 100, 63, 7] {
                assert_eq!(
                    pospopcnt_byteblend_on(&words[..len], b),
                    oracle_pospopcnt(&words[..len]),
                    "{b} len={len}"
                );
            }
        }
    }
}
