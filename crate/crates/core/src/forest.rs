//! Adder-forest kernel: sixteen trees of widening pairwise adders, one per
//! bit position, evaluated together with packed bit fields.
//!
//! A level-`j` partial sum is stored as `2^j` sub-accumulators. Sub-accumulator
//! `r` holds `2^j`-bit fields; the field at bit offset `f * 2^j` (within each
//! 16-bit lane) counts bit position `f * 2^j + r`. Combining two level-`j`
//! sums splits every field into its low and high halves and adds them into
//! fields twice as wide, so a field never holds more than `2^j` and never
//! overflows. After four levels each sub-accumulator `r` holds one 16-bit
//! field per lane: the count of bit `r` over the sixteen inputs.

use crate::counts::{PositionalCounts, POSITIONS};
use crate::scalar::pospopcnt_scalar_basic;

/// Registers (of four words each) per tree batch.
pub const BATCH_REGISTERS: usize = 16;
/// Words consumed per batch.
pub const BATCH_WORDS: usize = BATCH_REGISTERS * 4;

/// Low-half masks for fields of width 2, 4, 8, 16.
const HALF_MASK: [u64; 4] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
];

// Each 16-bit output field grows by at most 16 per batch.
const BATCHES_PER_FLUSH: usize = (u16::MAX as usize) / BATCH_REGISTERS;

/// One widening step: two sums of `S` sub-accumulators with `width`-bit
/// fields become one sum of `D = 2 * S` sub-accumulators with `2 * width`-bit
/// fields.
#[inline(always)]
fn widen<const S: usize, const D: usize, const CHECK: bool>(
    a: &[u64; S],
    b: &[u64; S],
    level: usize,
) -> [u64; D] {
    let width = 1u32 << level;
    let mask = HALF_MASK[level];
    let mut out = [0u64; D];
    for r in 0..S {
        out[r] = (a[r] & mask) + (b[r] & mask);
        out[r + S] = ((a[r] >> width) & mask) + ((b[r] >> width) & mask);
    }
    if CHECK {
        check_fields(&out, 2 * width, 1 << (level + 1));
    }
    out
}

fn check_fields(subs: &[u64], width: u32, bound: u64) {
    let field_mask = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
    for &s in subs {
        for f in 0..(64 / width) {
            let v = (s >> (f * width)) & field_mask;
            assert!(v <= bound, "field {v} exceeds {bound} at width {width}");
        }
    }
}

/// Runs the sixteen trees over one batch of sixteen registers.
///
/// `out[r]` holds, in each 16-bit lane, the number of the sixteen input
/// lanes with bit `r` set. With `CHECK` every level's fields are asserted
/// to stay within `2^level`.
#[inline(always)]
pub fn forest_batch<const CHECK: bool>(x: &[u64; BATCH_REGISTERS]) -> [u64; POSITIONS] {
    let mut s2 = [[0u64; 2]; 8];
    for (i, s) in s2.iter_mut().enumerate() {
        *s = widen::<1, 2, CHECK>(&[x[2 * i]], &[x[2 * i + 1]], 0);
    }
    let mut s4 = [[0u64; 4]; 4];
    for (i, s) in s4.iter_mut().enumerate() {
        *s = widen::<2, 4, CHECK>(&s2[2 * i], &s2[2 * i + 1], 1);
    }
    let s8a = widen::<4, 8, CHECK>(&s4[0], &s4[1], 2);
    let s8b = widen::<4, 8, CHECK>(&s4[2], &s4[3], 2);
    widen::<8, 16, CHECK>(&s8a, &s8b, 3)
}

#[inline(always)]
fn lane_sum(x: u64) -> u64 {
    (x & 0xffff) + ((x >> 16) & 0xffff) + ((x >> 32) & 0xffff) + (x >> 48)
}

fn flush(acc: &mut [u64; POSITIONS], counts: &mut PositionalCounts) {
    for (p, a) in acc.iter_mut().enumerate() {
        counts[p] += lane_sum(*a);
        *a = 0;
    }
}

/// Adder-forest positional population count.
pub fn pospopcnt_forest(words: &[u16]) -> PositionalCounts {
    let mut counts = PositionalCounts::zero();
    let mut acc = [0u64; POSITIONS];
    let mut pending = 0;
    let mut batches = words.chunks_exact(BATCH_WORDS);
    for batch in &mut batches {
        let mut regs = [0u64; BATCH_REGISTERS];
        for (r, chunk) in regs.iter_mut().zip(batch.chunks_exact(4)) {
            *r = u64::from(chunk[0])
                | u64::from(chunk[1]) << 16
                | u64::from(chunk[2]) << 32
                | u64::from(chunk[3]) << 48;
        }
        let sums = forest_batch::<false>(&regs);
        for (a, s) in acc.iter_mut().zip(sums) {
            *a += s;
        }
        pending += 1;
        if pending == BATCHES_PER_FLUSH {
            flush(&mut acc, &mut counts);
            pending = 0;
        }
    }
    flush(&mut acc, &mut counts);
    counts + pospopcnt_scalar_basic(batches.remainder())
}
