use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest flush interval for which a 16-bit lane counter cannot overflow.
pub const MAX_FLUSH_THRESHOLD: u32 = 65_535;

/// Input length (in words) from which `Auto` switches to the 1 kB circuit.
pub const DEFAULT_AUTO_THRESHOLD: usize = 4096;

/// Register widths the CSA kernels are built for.
pub const SUPPORTED_WIDTHS: [u32; 6] = [16, 32, 64, 128, 256, 512];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    ScalarBasic,
    /// Circuit over blocks of 4 registers.
    Csa4,
    /// Circuit over blocks of 8 registers.
    Csa8,
    /// Circuit over blocks of 16 registers.
    Csa16,
    Forest,
    ByteBlend,
    Auto,
}

impl KernelKind {
    /// Every concrete kernel, i.e. everything but `Auto`.
    pub const CONCRETE: [KernelKind; 6] = [
        KernelKind::ScalarBasic,
        KernelKind::Csa4,
        KernelKind::Csa8,
        KernelKind::Csa16,
        KernelKind::Forest,
        KernelKind::ByteBlend,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::ScalarBasic => "scalar",
            KernelKind::Csa4 => "csa4",
            KernelKind::Csa8 => "csa8",
            KernelKind::Csa16 => "csa16",
            KernelKind::Forest => "forest",
            KernelKind::ByteBlend => "byteblend",
            KernelKind::Auto => "auto",
        }
    }

    /// log2 of the number of registers per circuit block, for CSA kernels.
    pub fn csa_depth(self) -> Option<u32> {
        match self {
            KernelKind::Csa4 => Some(2),
            KernelKind::Csa8 => Some(3),
            KernelKind::Csa16 => Some(4),
            _ => None,
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "scalar" | "scalar_basic" | "scalarbasic" => KernelKind::ScalarBasic,
            "csa4" => KernelKind::Csa4,
            "csa8" => KernelKind::Csa8,
            "csa16" => KernelKind::Csa16,
            "forest" => KernelKind::Forest,
            "byteblend" | "byte_blend" | "blend" => KernelKind::ByteBlend,
            "auto" => KernelKind::Auto,
            _ => return Err(Error::InvalidConfig(format!("unknown kernel `{s}`"))),
        })
    }
}

/// Instruction set the vector kernels run on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Backend {
    /// Widest accelerated backend matching the register width, else portable.
    #[default]
    Auto,
    /// Plain integer code, any register width.
    Portable,
    /// 256-bit AVX2.
    Avx2,
    /// 512-bit AVX-512 (F + BW), ternary-logic CSA.
    Avx512,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Auto => "auto",
            Backend::Portable => "portable",
            Backend::Avx2 => "avx2",
            Backend::Avx512 => "avx512",
        }
    }

    /// Whether this backend can run on the current CPU.
    pub fn is_available(self) -> bool {
        match self {
            Backend::Auto | Backend::Portable => true,
            Backend::Avx2 => has_avx2(),
            Backend::Avx512 => has_avx512(),
        }
    }

    /// Register width the backend operates at, if fixed.
    pub fn fixed_width(self) -> Option<u32> {
        match self {
            Backend::Avx2 => Some(256),
            Backend::Avx512 => Some(512),
            Backend::Auto | Backend::Portable => None,
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "auto" => Backend::Auto,
            "portable" => Backend::Portable,
            "avx2" => Backend::Avx2,
            "avx512" => Backend::Avx512,
            _ => return Err(Error::InvalidConfig(format!("unknown backend `{s}`"))),
        })
    }
}

pub fn has_avx2() -> bool {
    #[cfg(target_arch = "x86_64")]
    {
        std::arch::is_x86_feature_detected!("avx2")
    }
    #[cfg(not(target_arch = "x86_64"))]
    {
        false
    }
}

pub fn has_avx512() -> bool {
    #[cfg(target_arch = "x86_64")]
    {
        std::arch::is_x86_feature_detected!("avx512f")
            && std::arch::is_x86_feature_detected!("avx512bw")
    }
    #[cfg(not(target_arch = "x86_64"))]
    {
        false
    }
}

/// Widest register width with an accelerated backend on this CPU, or 64.
pub fn native_width() -> u32 {
    if has_avx512() {
        512
    } else if has_avx2() {
        256
    } else {
        64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PospopcntConfig {
    pub kernel: KernelKind,
    /// Width W of one CSA register in bits (W/16 words per register).
    pub register_width_bits: u32,
    pub backend: Backend,
    /// Circuit blocks between transfers of the 16-bit lane counters.
    pub flush_threshold_blocks: u32,
    /// Stream length at which `Auto` moves from byte-blend to `Csa16`.
    pub auto_threshold_words: usize,
}

impl Default for PospopcntConfig {
    fn default() -> Self {
        PospopcntConfig {
            kernel: KernelKind::Auto,
            register_width_bits: native_width(),
            backend: Backend::Auto,
            flush_threshold_blocks: MAX_FLUSH_THRESHOLD,
            auto_threshold_words: DEFAULT_AUTO_THRESHOLD,
        }
    }
}

impl PospopcntConfig {
    pub fn with_kernel(kernel: KernelKind) -> Self {
        PospopcntConfig {
            kernel,
            ..Default::default()
        }
    }

    /// Portable backend at width `bits`.
    pub fn portable(kernel: KernelKind, bits: u32) -> Self {
        PospopcntConfig {
            kernel,
            register_width_bits: bits,
            backend: Backend::Portable,
            ..Default::default()
        }
    }

    pub fn flush_threshold(mut self, blocks: u32) -> Self {
        self.flush_threshold_blocks = blocks;
        self
    }

    /// Checks the type invariants and platform availability.
    pub fn validate(&self) -> Result<()> {
        let w = self.register_width_bits;
        if w % 16 != 0 {
            return Err(Error::InvalidConfig(format!(
                "register width {w} is not a multiple of 16"
            )));
        }
        if !SUPPORTED_WIDTHS.contains(&w) {
            return Err(Error::InvalidConfig(format!(
                "register width {w} not supported (expected one of {SUPPORTED_WIDTHS:?})"
            )));
        }
        if !(1..=MAX_FLUSH_THRESHOLD).contains(&self.flush_threshold_blocks) {
            return Err(Error::InvalidConfig(format!(
                "flush threshold {} outside [1, {MAX_FLUSH_THRESHOLD}]",
                self.flush_threshold_blocks
            )));
        }
        if let Some(fixed) = self.backend.fixed_width() {
            if fixed != w {
                return Err(Error::InvalidConfig(format!(
                    "{} backend requires a {fixed}-bit register width, got {w}",
                    self.backend
                )));
            }
        }
        if !self.backend.is_available() {
            return Err(Error::KernelUnavailable {
                kernel: self.kernel,
                backend: self.backend,
            });
        }
        Ok(())
    }

    /// The backend actually used for CSA kernels after resolving `Auto`.
    pub fn resolved_backend(&self) -> Backend {
        match self.backend {
            Backend::Auto => match self.register_width_bits {
                512 if has_avx512() => Backend::Avx512,
                256 if has_avx2() => Backend::Avx2,
                _ => Backend::Portable,
            },
            b => b,
        }
    }

    /// The concrete kernel used for a stream of `len` words.
    pub fn resolved_kernel(&self, len: usize) -> KernelKind {
        match self.kernel {
            KernelKind::Auto if len < self.auto_threshold_words => KernelKind::ByteBlend,
            KernelKind::Auto => KernelKind::Csa16,
            k => k,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_names_round_trip() {
        for k in KernelKind::CONCRETE.into_iter().chain([KernelKind::Auto]) {
            assert_eq!(k.name().parse::<KernelKind>().unwrap(), k);
        }
        assert!("csa32".parse::<KernelKind>().is_err());
    }

    #[test]
    fn validation() {
        assert!(PospopcntConfig::default().validate().is_ok());
        assert!(PospopcntConfig::portable(KernelKind::Csa4, 48).validate().is_err());
        assert!(PospopcntConfig::portable(KernelKind::Csa4, 72).validate().is_err());
        assert!(PospopcntConfig::portable(KernelKind::Csa4, 64)
            .flush_threshold(0)
            .validate()
            .is_err());
        assert!(PospopcntConfig::portable(KernelKind::Csa4, 64)
            .flush_threshold(65_536)
            .validate()
            .is_err());
        let mismatched = PospopcntConfig {
            backend: Backend::Avx2,
            ..PospopcntConfig::portable(KernelKind::Csa16, 512)
        };
        assert!(matches!(mismatched.validate(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn unavailable_backend_is_reported() {
        let cfg = PospopcntConfig {
            backend: Backend::Avx512,
            ..PospopcntConfig::portable(KernelKind::Csa16, 512)
        };
        if has_avx512() {
            assert!(cfg.validate().is_ok());
        } else {
            assert!(matches!(cfg.validate(), Err(Error::KernelUnavailable { .. })));
        }
    }

    #[test]
    fn auto_threshold() {
        let cfg = PospopcntConfig::default();
        assert_eq!(cfg.resolved_kernel(4095), KernelKind::ByteBlend);
        assert_eq!(cfg.resolved_kernel(4096), KernelKind::Csa16);
        assert_eq!(cfg.resolved_kernel(0), KernelKind::ByteBlend);
    }
}
