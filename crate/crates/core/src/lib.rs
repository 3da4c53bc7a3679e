//! Positional population count over streams of 16-bit words.
//!
//! For a stream of words, `counts[p]` is the number of words with bit `p`
//! (least significant first) set. The crate provides a naive oracle and
//! several kernels that must agree with it bit for bit:
//!
//! * [`pospopcnt_scalar_basic`]: sixteen shift-mask-add updates per word.
//! * [`csa`]: carry-save-adder circuits over blocks of 4, 8 or 16 registers
//!   with vectorized 16-bit lane counters, portable at any supported width
//!   and accelerated with AVX2 / AVX-512 where present.
//! * [`pospopcnt_forest`]: sixteen trees of widening adders.
//! * [`pospopcnt_byteblend`]: a small-input kernel that walks every byte's
//!   bits through its MSB.
//!
//! [`pospopcnt`] dispatches on a [`PospopcntConfig`]; [`flagstats`] builds
//! SAM FLAG statistics on top of it.

pub mod byteblend;
pub mod config;
pub mod counts;
pub mod csa;
pub mod dispatch;
pub mod error;
pub mod flagstats;
pub mod forest;
pub mod instrument;
pub mod lanes;
pub mod oracle;
pub mod scalar;

pub use byteblend::pospopcnt_byteblend;
pub use config::{native_width, Backend, KernelKind, PospopcntConfig};
pub use counts::{merge_counts, PositionalCounts, POSITIONS};
pub use csa::pospopcnt_csa;
pub use dispatch::{pospopcnt, pospopcnt_parallel};
pub use error::{Error, Result};
pub use flagstats::{flagstats_pospopcnt, flagstats_reference, FlagBucket, FlagSummary};
pub use forest::pospopcnt_forest;
pub use lanes::LaneVector;
pub use oracle::oracle_pospopcnt;
pub use scalar::pospopcnt_scalar_basic;

/// Ten one-hot country observations (France x3, Portugal x2, USA x4,
/// China x1) with USA at bit 0 through Australia at bit 7.
pub const COUNTRY_STREAM: [u16; 10] = [
    1 << 4, // France
    1 << 4, // France
    1 << 2, // Portugal
    1 << 4, // France
    1 << 0, // USA
    1 << 2, // Portugal
    1 << 0, // USA
    1 << 0, // USA
    1 << 0, // USA
    1 << 5, // China
];
