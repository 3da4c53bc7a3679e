use thiserror::Error;

use crate::config::{Backend, KernelKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The requested kernel/backend pair cannot run on this CPU or build.
    #[error("kernel unavailable: {kernel} on the {backend} backend")]
    KernelUnavailable { kernel: KernelKind, backend: Backend },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A circuit was handed the wrong number of input registers.
    #[error("csa block expects {expected} input registers, got {got}")]
    BlockSize { expected: usize, got: usize },

    /// FLAG words may only use the low twelve bits.
    #[error("invalid FLAG word 0x{word:04x} at word offset {offset} (bits 12-15 must be clear)")]
    InvalidFlagWord { offset: usize, word: u16 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
