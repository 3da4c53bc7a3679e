//! Register abstraction shared by the carry-save-adder kernels.
//!
//! A [`LaneVector`] is a W-bit value read two ways: as W independent 1-bit
//! channels for the adder arithmetic, and as W/16 lanes of 16-bit words
//! for counter extraction. Channel `16 * lane + p` always carries bit `p`
//! of the word loaded into that lane, so channel index mod 16 is the bit
//! position regardless of backend.

pub(crate) mod sealed {
    pub trait Sealed {}
}

/// Largest number of 16-bit lanes in any backend (512-bit registers).
pub const MAX_LANES: usize = 32;

pub trait LaneVector: Copy + sealed::Sealed {
    /// Register width W in bits.
    const BITS: usize;
    /// Number of 16-bit lanes, W/16.
    const LANES: usize = Self::BITS / 16;

    fn zero() -> Self;

    /// Loads the first `LANES` words of `words` into consecutive lanes.
    fn load(words: &[u16]) -> Self;

    /// Writes the lanes into the first `LANES` slots of `out`.
    fn store(self, out: &mut [u16]);

    fn and(self, other: Self) -> Self;
    fn or(self, other: Self) -> Self;
    fn xor(self, other: Self) -> Self;

    /// Bitwise carry-save adder: returns `(high, low)` with
    /// `2 * high + low == a + b + c` on every channel.
    #[inline(always)]
    fn csa(a: Self, b: Self, c: Self) -> (Self, Self) {
        let u = a.xor(b);
        (a.and(b).or(u.and(c)), u.xor(c))
    }

    /// Keeps only the least significant bit of each 16-bit lane.
    fn lane_lsb(self) -> Self;

    /// Lane-wise 16-bit addition (wrapping within each lane).
    fn lane_add(self, other: Self) -> Self;

    /// Lane-wise logical right shift by one.
    fn lane_shr1(self) -> Self;

    /// Sum of all 16-bit lanes.
    #[inline]
    fn lane_sum(self) -> u64 {
        let mut buf = [0u16; MAX_LANES];
        self.store(&mut buf);
        buf[..Self::LANES].iter().map(|&w| u64::from(w)).sum()
    }

    /// Builds a register from explicit lane values (test and example helper).
    fn from_lanes(lanes: &[u16]) -> Self {
        assert_eq!(lanes.len(), Self::LANES, "lane count mismatch");
        Self::load(lanes)
    }

    fn to_lanes(self) -> Vec<u16> {
        let mut buf = [0u16; MAX_LANES];
        self.store(&mut buf);
        buf[..Self::LANES].to_vec()
    }
}

/// Replicates a 16-bit pattern across a 64-bit word.
const fn splat16(x: u16) -> u64 {
    (x as u64) * 0x0001_0001_0001_0001
}

const LSB16: u64 = splat16(0x0001);
const LOW15: u64 = splat16(0x7fff);
const MSB16: u64 = splat16(0x8000);

macro_rules! scalar_lanes {
    ($t:ty) => {
        impl sealed::Sealed for $t {}

        impl LaneVector for $t {
            const BITS: usize = <$t>::BITS as usize;

            #[inline(always)]
            fn zero() -> Self {
                0
            }

            #[inline(always)]
            fn load(words: &[u16]) -> Self {
                let words = &words[..Self::LANES];
                let mut v: $t = 0;
                for (i, &w) in words.iter().enumerate() {
                    v |= (w as $t) << (16 * i);
                }
                v
            }

            #[inline(always)]
            fn store(self, out: &mut [u16]) {
                for (i, o) in out[..Self::LANES].iter_mut().enumerate() {
                    *o = (self >> (16 * i)) as u16;
                }
            }

            #[inline(always)]
            fn and(self, other: Self) -> Self {
                self & other
            }

            #[inline(always)]
            fn or(self, other: Self) -> Self {
                self | other
            }

            #[inline(always)]
            fn xor(self, other: Self) -> Self {
                self ^ other
            }

            #[inline(always)]
            fn lane_lsb(self) -> Self {
                self & (LSB16 as $t)
            }

            #[inline(always)]
            fn lane_add(self, other: Self) -> Self {
                // SWAR add: low 15 bits normally, top bit by xor so no carry
                // leaves a lane.
                let low = (self & LOW15 as $t).wrapping_add(other & LOW15 as $t);
                low ^ ((self ^ other) & MSB16 as $t)
            }

            #[inline(always)]
            fn lane_shr1(self) -> Self {
                (self >> 1) & (LOW15 as $t)
            }
        }
    };
}

scalar_lanes!(u16);
scalar_lanes!(u32);
scalar_lanes!(u64);

/// Portable `64 * K`-bit register made of `K` machine words.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Wide<const K: usize>(pub [u64; K]);

pub type Wide128 = Wide<2>;
pub type Wide256 = Wide<4>;
pub type Wide512 = Wide<8>;

impl<const K: usize> Wide<K> {
    #[inline(always)]
    fn map(self, f: impl Fn(u64) -> u64) -> Self {
        Wide(self.0.map(f))
    }

    #[inline(always)]
    fn zip(self, other: Self, f: impl Fn(u64, u64) -> u64) -> Self {
        let mut out = [0u64; K];
        for i in 0..K {
            out[i] = f(self.0[i], other.0[i]);
        }
        Wide(out)
    }
}

impl<const K: usize> sealed::Sealed for Wide<K> {}

impl<const K: usize> LaneVector for Wide<K> {
    const BITS: usize = 64 * K;

    #[inline(always)]
    fn zero() -> Self {
        Wide([0; K])
    }

    #[inline(always)]
    fn load(words: &[u16]) -> Self {
        let words = &words[..Self::LANES];
        let mut out = [0u64; K];
        for (o, chunk) in out.iter_mut().zip(words.chunks_exact(4)) {
            *o = u64::load(chunk);
        }
        Wide(out)
    }

    #[inline(always)]
    fn store(self, out: &mut [u16]) {
        for (w, chunk) in self.0.iter().zip(out[..Self::LANES].chunks_exact_mut(4)) {
            w.store(chunk);
        }
    }

    #[inline(always)]
    fn and(self, other: Self) -> Self {
        self.zip(other, |a, b| a & b)
    }

    #[inline(always)]
    fn or(self, other: Self) -> Self {
        self.zip(other, |a, b| a | b)
    }

    #[inline(always)]
    fn xor(self, other: Self) -> Self {
        self.zip(other, |a, b| a ^ b)
    }

    #[inline(always)]
    fn lane_lsb(self) -> Self {
        self.map(u64::lane_lsb)
    }

    #[inline(always)]
    fn lane_add(self, other: Self) -> Self {
        self.zip(other, u64::lane_add)
    }

    #[inline(always)]
    fn lane_shr1(self) -> Self {
        self.map(u64::lane_shr1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lane_ops_agree<V: LaneVector>(a: &[u16], b: &[u16]) {
        let va = V::from_lanes(&a[..V::LANES]);
        let vb = V::from_lanes(&b[..V::LANES]);
        let add = va.lane_add(vb).to_lanes();
        let shr = va.lane_shr1().to_lanes();
        let lsb = va.lane_lsb().to_lanes();
        for i in 0..V::LANES {
            assert_eq!(add[i], a[i].wrapping_add(b[i]));
            assert_eq!(shr[i], a[i] >> 1);
            assert_eq!(lsb[i], a[i] & 1);
        }
        let sum: u64 = a[..V::LANES].iter().map(|&x| u64::from(x)).sum();
        assert_eq!(va.lane_sum(), sum);
    }

    #[test]
    fn lane_ops_match_per_lane_arithmetic() {
        let a: Vec<u16> = (0..32u16).map(|i| i.wrapping_mul(0x9e37) ^ 0xffff).collect();
        let b: Vec<u16> = (0..32u16).map(|i| i.wrapping_mul(0x7f4a).wrapping_add(0x8001)).collect();
        lane_ops_agree::<u16>(&a, &b);
        lane_ops_agree::<u32>(&a, &b);
        lane_ops_agree::<u64>(&a, &b);
        lane_ops_agree::<Wide128>(&a, &b);
        lane_ops_agree::<Wide256>(&a, &b);
        lane_ops_agree::<Wide512>(&a, &b);
    }

    #[test]
    fn load_places_word_k_in_lane_k() {
        let v = u64::load(&[0x0001, 0x0002, 0x0003, 0x8000]);
        assert_eq!(v, 0x8000_0003_0002_0001);
        assert_eq!(v.to_lanes(), vec![1, 2, 3, 0x8000]);
    }
}
