//! Carry-save-adder (Harley-Seal style) positional population count.
//!
//! A block of `2^N` registers is folded into the running carry registers
//! `B0..B(N-1)` with `2^N - 1` adder calls, leaving one register `T` of
//! weight `2^N`. The bits of `T` are extracted per 16-bit lane into sixteen
//! vectors of lane counters, which are multiplied by `2^N` and reduced into
//! the 64-bit totals only when flushed. After the last block the carries are
//! drained with weights `1, 2, .., 2^(N-1)` and the tail that does not fill
//! a block goes through the scalar kernel.

#[cfg(target_arch = "x86_64")]
pub(crate) mod x86;

use crate::config::{Backend, PospopcntConfig};
use crate::counts::{PositionalCounts, POSITIONS};
use crate::error::{Error, Result};
use crate::lanes::{LaneVector, Wide128, Wide256, Wide512};
use crate::scalar::pospopcnt_scalar_basic;

/// High and low sum bits of a carry-save addition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CsaOutput<V> {
    pub high: V,
    pub low: V,
}

/// Channel-wise `a + b + c` as two bit planes.
#[inline(always)]
pub fn csa<V: LaneVector>(a: V, b: V, c: V) -> CsaOutput<V> {
    let (high, low) = V::csa(a, b, c);
    CsaOutput { high, low }
}

/// Running carry registers `B0..B(N-1)`; register `j` has weight `2^j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CarrySet<V, const N: usize> {
    pub regs: [V; N],
}

impl<V: LaneVector, const N: usize> CarrySet<V, N> {
    /// Registers consumed per block.
    pub const BLOCK_REGISTERS: usize = 1 << N;

    pub fn new() -> Self {
        CarrySet {
            regs: [V::zero(); N],
        }
    }
}

impl<V: LaneVector, const N: usize> Default for CarrySet<V, N> {
    fn default() -> Self {
        Self::new()
    }
}

#[inline(always)]
fn fold2<V: LaneVector>(b: &mut [V], x: &[V]) -> V {
    let o = csa(b[0], x[0], x[1]);
    b[0] = o.low;
    o.high
}

#[inline(always)]
fn fold4<V: LaneVector>(b: &mut [V], x: &[V]) -> V {
    let ta = fold2(b, &x[..2]);
    let tb = fold2(b, &x[2..4]);
    let o = csa(b[1], ta, tb);
    b[1] = o.low;
    o.high
}

#[inline(always)]
fn fold8<V: LaneVector>(b: &mut [V], x: &[V]) -> V {
    let ta = fold4(b, &x[..4]);
    let tb = fold4(b, &x[4..8]);
    let o = csa(b[2], ta, tb);
    b[2] = o.low;
    o.high
}

#[inline(always)]
fn fold16<V: LaneVector>(b: &mut [V], x: &[V]) -> V {
    let ta = fold8(b, &x[..8]);
    let tb = fold8(b, &x[8..16]);
    let o = csa(b[3], ta, tb);
    b[3] = o.low;
    o.high
}

#[inline(always)]
fn circuit<V: LaneVector, const N: usize>(carries: &mut [V; N], inputs: &[V]) -> V {
    match N {
        1 => fold2(carries, inputs),
        2 => fold4(carries, inputs),
        3 => fold8(carries, inputs),
        4 => fold16(carries, inputs),
        _ => unreachable!("circuit depth {N} not built"),
    }
}

/// Folds `2^N` input registers into `carries` and returns the emitted
/// register of weight `2^N`.
///
/// Per channel: `new residual + 2^N * T == old residual + set input bits`.
/// Uses exactly `2^N - 1` adder calls.
pub fn csa_block<V: LaneVector, const N: usize>(
    carries: &mut CarrySet<V, N>,
    inputs: &[V],
) -> Result<V> {
    if !(1..=4).contains(&N) {
        return Err(Error::InvalidConfig(format!("circuit depth {N} not supported")));
    }
    let expected = 1usize << N;
    if inputs.len() != expected {
        return Err(Error::BlockSize {
            expected,
            got: inputs.len(),
        });
    }
    Ok(circuit(&mut carries.regs, inputs))
}

/// Sixteen vectors of 16-bit lane counters, one per bit position.
#[derive(Debug, Clone, Copy)]
pub struct VectorCounterBank<V> {
    pub counters: [V; POSITIONS],
    pub blocks_since_flush: u32,
}

impl<V: LaneVector> VectorCounterBank<V> {
    pub fn new() -> Self {
        VectorCounterBank {
            counters: [V::zero(); POSITIONS],
            blocks_since_flush: 0,
        }
    }

    /// Adds bit `pos` of every lane of `top` to `counters[pos]`.
    ///
    /// The caller must flush before `blocks_since_flush` would exceed
    /// 65535, otherwise a lane counter can wrap.
    #[inline(always)]
    pub fn extract_top(&mut self, mut top: V) {
        for counter in self.counters.iter_mut() {
            *counter = counter.lane_add(top.lane_lsb());
            top = top.lane_shr1();
        }
        self.blocks_since_flush += 1;
    }

    /// Moves the lane counters into `counts`, each scaled by `weight`, and
    /// clears the bank.
    #[inline]
    pub fn flush_into(&mut self, counts: &mut PositionalCounts, weight: u64) {
        if self.blocks_since_flush == 0 {
            return;
        }
        for (p, counter) in self.counters.iter_mut().enumerate() {
            counts[p] += weight * counter.lane_sum();
            *counter = V::zero();
        }
        self.blocks_since_flush = 0;
    }
}

impl<V: LaneVector> Default for VectorCounterBank<V> {
    fn default() -> Self {
        Self::new()
    }
}

/// Value-style form of [`VectorCounterBank::extract_top`].
pub fn extract_top<V: LaneVector>(top: V, mut bank: VectorCounterBank<V>) -> VectorCounterBank<V> {
    bank.extract_top(top);
    bank
}

/// Value-style form of [`VectorCounterBank::flush_into`].
pub fn flush_bank<V: LaneVector>(
    mut bank: VectorCounterBank<V>,
    mut counts: PositionalCounts,
    weight: u64,
) -> (VectorCounterBank<V>, PositionalCounts) {
    bank.flush_into(&mut counts, weight);
    (bank, counts)
}

/// Drains the carry registers: every set bit of `B_j` at channel `c` adds
/// `2^j` to `counts[c mod 16]`.
///
/// Each register goes through the same lane extraction as an emitted block
/// register, flushed with its own weight.
#[inline(always)]
pub fn finalize_carries<V: LaneVector, const N: usize>(
    carries: &CarrySet<V, N>,
    mut counts: PositionalCounts,
) -> PositionalCounts {
    for (j, reg) in carries.regs.iter().enumerate() {
        let mut bank = VectorCounterBank::<V>::new();
        bank.extract_top(*reg);
        bank.flush_into(&mut counts, 1 << j);
    }
    counts
}

/// Full driver for one register type and circuit depth.
#[inline(always)]
fn run<V: LaneVector, const N: usize>(words: &[u16], flush_threshold: u32) -> PositionalCounts {
    let regs_per_block = 1usize << N;
    let block_words = regs_per_block * V::LANES;
    let weight = regs_per_block as u64;

    let mut counts = PositionalCounts::zero();
    let mut carries = CarrySet::<V, N>::new();
    let mut bank = VectorCounterBank::<V>::new();
    let mut regs = [V::zero(); 16];

    let mut blocks = words.chunks_exact(block_words);
    for block in &mut blocks {
        for (i, r) in regs[..regs_per_block].iter_mut().enumerate() {
            *r = V::load(&block[i * V::LANES..]);
        }
        let top = circuit(&mut carries.regs, &regs[..regs_per_block]);
        bank.extract_top(top);
        if bank.blocks_since_flush >= flush_threshold {
            bank.flush_into(&mut counts, weight);
        }
    }
    bank.flush_into(&mut counts, weight);
    counts = finalize_carries(&carries, counts);
    counts + pospopcnt_scalar_basic(blocks.remainder())
}

fn run_portable<const N: usize>(words: &[u16], width: u32, threshold: u32) -> PositionalCounts {
    match width {
        16 => run::<u16, N>(words, threshold),
        32 => run::<u32, N>(words, threshold),
        64 => run::<u64, N>(words, threshold),
        128 => run::<Wide128, N>(words, threshold),
        256 => run::<Wide256, N>(words, threshold),
        512 => run::<Wide512, N>(words, threshold),
        _ => unreachable!("width validated"),
    }
}

fn run_depth<const N: usize>(words: &[u16], config: &PospopcntConfig) -> PositionalCounts {
    let threshold = config.flush_threshold_blocks;
    match config.resolved_backend() {
        #[cfg(target_arch = "x86_64")]
        // SAFETY: validate() confirmed the CPU supports the backend.
        Backend::Avx512 => unsafe { x86::run_avx512::<N>(words, threshold) },
        #[cfg(target_arch = "x86_64")]
        Backend::Avx2 => unsafe { x86::run_avx2::<N>(words, threshold) },
        _ => run_portable::<N>(words, config.register_width_bits, threshold),
    }
}

/// Positional population count with the circuit selected by
/// `config.kernel` (`Csa4`, `Csa8` or `Csa16`).
pub fn pospopcnt_csa(words: &[u16], config: &PospopcntConfig) -> Result<PositionalCounts> {
    config.validate()?;
    let depth = config.kernel.csa_depth().ok_or_else(|| {
        Error::InvalidConfig(format!("{} is not a carry-save-adder kernel", config.kernel))
    })?;
    Ok(match depth {
        2 => run_depth::<2>(words, config),
        3 => run_depth::<3>(words, config),
        4 => run_depth::<4>(words, config),
        _ => unreachable!(),
    })
}
