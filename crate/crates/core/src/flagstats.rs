//! SAM FLAG summary statistics.
//!
//! Two routes to the same numbers: a branchy transcription of the samtools
//! per-record logic, and a branchless pipeline that rewrites each FLAG with
//! mask-select operations so that the statistics fall out of two positional
//! population counts (one per QC bucket).

use std::ops::AddAssign;

use crate::config::PospopcntConfig;
use crate::counts::PositionalCounts;
use crate::dispatch::pospopcnt;
use crate::error::{Error, Result};

pub const FPAIRED: u16 = 0x0001;
pub const FPROPER_PAIR: u16 = 0x0002;
pub const FUNMAP: u16 = 0x0004;
pub const FMUNMAP: u16 = 0x0008;
pub const FREVERSE: u16 = 0x0010;
pub const FMREVERSE: u16 = 0x0020;
pub const FREAD1: u16 = 0x0040;
pub const FREAD2: u16 = 0x0080;
pub const FSECONDARY: u16 = 0x0100;
pub const FQCFAIL: u16 = 0x0200;
pub const FDUP: u16 = 0x0400;
pub const FSUPPLEMENTARY: u16 = 0x0800;

/// Bits defined by the FLAG format.
pub const FLAG_MASK: u16 = 0x0fff;
/// Synthetic bit set by [`flag_transform`]: paired, read mapped, mate mapped.
pub const PAIR_MAP_BIT: u16 = 0x1000;

/// Statistics for one QC bucket.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FlagBucket {
    pub total: u64,
    pub secondary: u64,
    pub supplementary: u64,
    pub n_pair_good: u64,
    pub n_read1: u64,
    pub n_read2: u64,
    pub n_sgltn: u64,
    pub pair_map: u64,
    pub mapped: u64,
    /// Records *without* the duplicate flag.
    pub dup: u64,
}

impl FlagBucket {
    /// `(label, value)` pairs in report order.
    pub fn fields(&self) -> [(&'static str, u64); 10] {
        [
            ("total", self.total),
            ("secondary", self.secondary),
            ("supplementary", self.supplementary),
            ("n_pair_good", self.n_pair_good),
            ("n_read1", self.n_read1),
            ("n_read2", self.n_read2),
            ("n_sgltn", self.n_sgltn),
            ("pair_map", self.pair_map),
            ("mapped", self.mapped),
            ("dup", self.dup),
        ]
    }
}

impl AddAssign for FlagBucket {
    fn add_assign(&mut self, o: FlagBucket) {
        self.total += o.total;
        self.secondary += o.secondary;
        self.supplementary += o.supplementary;
        self.n_pair_good += o.n_pair_good;
        self.n_read1 += o.n_read1;
        self.n_read2 += o.n_read2;
        self.n_sgltn += o.n_sgltn;
        self.pair_map += o.pair_map;
        self.mapped += o.mapped;
        self.dup += o.dup;
    }
}

/// Per-bucket statistics: index 0 passed QC, index 1 failed QC.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FlagSummary {
    pub total: u64,
    pub buckets: [FlagBucket; 2],
}

impl FlagSummary {
    pub fn pass(&self) -> &FlagBucket {
        &self.buckets[0]
    }

    pub fn fail(&self) -> &FlagBucket {
        &self.buckets[1]
    }
}

impl AddAssign for FlagSummary {
    fn add_assign(&mut self, o: FlagSummary) {
        self.total += o.total;
        self.buckets[0] += o.buckets[0];
        self.buckets[1] += o.buckets[1];
    }
}

/// Rejects words using bits 12-15; reports the first offender.
pub fn validate_flags(words: &[u16]) -> Result<()> {
    match words.iter().position(|&w| w & !FLAG_MASK != 0) {
        Some(offset) => Err(Error::InvalidFlagWord {
            offset,
            word: words[offset],
        }),
        None => Ok(()),
    }
}

/// Branchy per-record statistics, as samtools computes them.
pub fn flagstats_reference(words: &[u16]) -> Result<FlagSummary> {
    validate_flags(words)?;
    let mut out = FlagSummary {
        total: words.len() as u64,
        ..Default::default()
    };
    for &c in words {
        let b = &mut out.buckets[usize::from(c & FQCFAIL != 0)];
        b.total += 1;
        if c & FSECONDARY != 0 {
            b.secondary += 1;
        } else if c & FSUPPLEMENTARY != 0 {
            b.supplementary += 1;
        } else if c & FPAIRED != 0 {
            if c & FPROPER_PAIR != 0 && c & FUNMAP == 0 {
                b.n_pair_good += 1;
            }
            if c & FREAD1 != 0 {
                b.n_read1 += 1;
            }
            if c & FREAD2 != 0 {
                b.n_read2 += 1;
            }
            if c & FMUNMAP != 0 && c & FUNMAP == 0 {
                b.n_sgltn += 1;
            }
            if c & FUNMAP == 0 && c & FMUNMAP == 0 {
                b.pair_map += 1;
            }
        }
        if c & FUNMAP == 0 {
            b.mapped += 1;
        }
        if c & FDUP == 0 {
            b.dup += 1;
        }
    }
    Ok(out)
}

/// All-ones when `pred` holds, else zero.
#[inline(always)]
fn select(pred: bool) -> u16 {
    u16::from(pred).wrapping_neg()
}

/// Rewrites one FLAG so that its positional counts yield the statistics.
///
/// Returns `(pass, fail)`: exactly one of them carries the rewritten word,
/// chosen by `FQCFAIL`; the other is zero. The rewritten word keeps
/// `FUNMAP`, `FDUP` and `FQCFAIL` always. A secondary record keeps only
/// `FSECONDARY` and a supplementary one only `FSUPPLEMENTARY` on top of
/// that. A primary paired record also keeps `FPAIRED`, `FREAD1`, `FREAD2`,
/// plus `FPROPER_PAIR`/`FMUNMAP` only while the read is mapped, and gains
/// [`PAIR_MAP_BIT`] when read and mate are both mapped. Unpaired primary
/// records drop every pairing bit.
#[inline]
pub fn flag_transform(c: u16) -> (u16, u16) {
    let secondary = select(c & FSECONDARY != 0);
    let not_primary = select(c & (FSECONDARY | FSUPPLEMENTARY) != 0);
    let paired = select(c & FPAIRED != 0);
    let unmapped = select(c & FUNMAP != 0);
    let mate_unmapped = select(c & FMUNMAP != 0);

    let primary_paired = !not_primary & paired;
    let keep = (FUNMAP | FDUP | FQCFAIL)
        | (not_primary & (FSECONDARY | (FSUPPLEMENTARY & !secondary)))
        | (primary_paired & (FPAIRED | FREAD1 | FREAD2 | (!unmapped & (FPROPER_PAIR | FMUNMAP))));
    let pair_map = primary_paired & !unmapped & !mate_unmapped & PAIR_MAP_BIT;
    let dat = (c & keep) | pair_map;

    let failed = select(dat & FQCFAIL != 0);
    (dat & !failed, dat & failed)
}

fn bucket_from_counts(total: u64, c: &PositionalCounts) -> FlagBucket {
    FlagBucket {
        total,
        secondary: c[8],
        supplementary: c[11],
        n_pair_good: c[1],
        n_read1: c[6],
        n_read2: c[7],
        n_sgltn: c[3],
        pair_map: c[12],
        mapped: total - c[2],
        dup: total - c[10],
    }
}

/// Words rewritten per pass; bounds the scratch buffers.
const CHUNK_WORDS: usize = 1 << 16;

/// Branchless statistics via two positional population counts.
pub fn flagstats_pospopcnt(words: &[u16], config: &PospopcntConfig) -> Result<FlagSummary> {
    config.validate()?;
    validate_flags(words)?;
    let mut pass_words = Vec::with_capacity(CHUNK_WORDS.min(words.len()));
    let mut fail_words = Vec::with_capacity(CHUNK_WORDS.min(words.len()));
    let mut pass = PositionalCounts::zero();
    let mut fail = PositionalCounts::zero();
    for chunk in words.chunks(CHUNK_WORDS) {
        pass_words.clear();
        fail_words.clear();
        for &c in chunk {
            let (l, lu) = flag_transform(c);
            pass_words.push(l);
            fail_words.push(lu);
        }
        pass += pospopcnt(&pass_words, config)?;
        fail += pospopcnt(&fail_words, config)?;
    }
    let total = words.len() as u64;
    let failed = fail[9];
    Ok(FlagSummary {
        total,
        buckets: [
            bucket_from_counts(total - failed, &pass),
            bucket_from_counts(failed, &fail),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(v: u16) -> FlagSummary {
        flagstats_reference(&[v]).unwrap()
    }

    #[test]
    fn reference_traces() {
        let s = single(0x0003);
        assert_eq!(
            *s.pass(),
            FlagBucket { total: 1, n_pair_good: 1, pair_map: 1, mapped: 1, dup: 1, ..Default::default() }
        );
        assert_eq!(*s.fail(), FlagBucket::default());

        let s = single(0x0100);
        assert_eq!(
            *s.pass(),
            FlagBucket { total: 1, secondary: 1, mapped: 1, dup: 1, ..Default::default() }
        );

        let s = single(0x0200);
        assert_eq!(*s.pass(), FlagBucket::default());
        assert_eq!(*s.fail(), FlagBucket { total: 1, mapped: 1, dup: 1, ..Default::default() });

        assert_eq!(flagstats_reference(&[]).unwrap(), FlagSummary::default());
    }

    #[test]
    fn transform_examples() {
        let (l, lu) = flag_transform(0x0003);
        assert_eq!(l, FPAIRED | FPROPER_PAIR | PAIR_MAP_BIT);
        assert_eq!(lu, 0);

        assert_eq!(flag_transform(0x0100), (0x0100, 0));

        let (l, lu) = flag_transform(0x0204);
        assert_eq!(l, 0);
        assert_ne!(lu & FUNMAP, 0);
        assert_ne!(lu & FQCFAIL, 0);
    }

    #[test]
    fn routing_partition() {
        for v in 0..=FLAG_MASK {
            let (l, lu) = flag_transform(v);
            if v & FQCFAIL != 0 {
                assert_eq!(l, 0);
                assert_ne!(lu, 0);
            } else {
                assert_eq!(lu, 0);
            }
        }
    }

    #[test]
    fn exhaustive_single_values() {
        let cfg = PospopcntConfig::default();
        for v in 0..=FLAG_MASK {
            assert_eq!(
                flagstats_pospopcnt(&[v], &cfg).unwrap(),
                flagstats_reference(&[v]).unwrap(),
                "flag 0x{v:03x}"
            );
        }
        assert_eq!(flagstats_pospopcnt(&[], &cfg).unwrap(), FlagSummary::default());
    }

    #[test]
    fn reserved_bits_rejected_by_both_paths() {
        let words = [0x0003, 0x0fff, 0x1000, 0x0001];
        let err = Error::InvalidFlagWord { offset: 2, word: 0x1000 };
        assert_eq!(flagstats_reference(&words), Err(err.clone()));
        assert_eq!(flagstats_pospopcnt(&words, &PospopcntConfig::default()), Err(err));
    }
}
