use crate::byteblend::pospopcnt_byteblend_on;
use crate::config::{KernelKind, PospopcntConfig};
use crate::counts::PositionalCounts;
use crate::csa::pospopcnt_csa;
use crate::error::Result;
use crate::forest::pospopcnt_forest;
use crate::scalar::pospopcnt_scalar_basic;

/// Positional population count with the kernel chosen by `config`.
///
/// Every kernel returns exactly the oracle's counts; `Auto` picks
/// byte-blend below `config.auto_threshold_words` and the 16-register
/// circuit at or above it.
pub fn pospopcnt(words: &[u16], config: &PospopcntConfig) -> Result<PositionalCounts> {
    config.validate()?;
    Ok(match config.resolved_kernel(words.len()) {
        KernelKind::ScalarBasic => pospopcnt_scalar_basic(words),
        KernelKind::Forest => pospopcnt_forest(words),
        KernelKind::ByteBlend => pospopcnt_byteblend_on(words, config.backend),
        kernel @ (KernelKind::Csa4 | KernelKind::Csa8 | KernelKind::Csa16) => {
            pospopcnt_csa(words, &PospopcntConfig { kernel, ..*config })?
        }
        KernelKind::Auto => unreachable!("resolved above"),
    })
}

/// Splits `words` into `threads` contiguous chunks, counts them on scoped
/// threads and merges the results.
pub fn pospopcnt_parallel(
    words: &[u16],
    config: &PospopcntConfig,
    threads: usize,
) -> Result<PositionalCounts> {
    config.validate()?;
    let threads = threads.max(1);
    let chunk = words.len().div_ceil(threads).max(1);
    std::thread::scope(|s| {
        let handles: Vec<_> = words
            .chunks(chunk)
            .map(|part| s.spawn(move || pospopcnt(part, config)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("counting thread panicked"))
            .sum()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_pospopcnt;

    fn words(len: usize) -> Vec<u16> {
        (0..len as u32).map(|i| (i.wrapping_mul(0x01000193) ^ (i >> 3)) as u16).collect()
    }

    #[test]
    fn auto_on_country_stream() {
        let cfg = PospopcntConfig::default();
        assert_eq!(pospopcnt(&crate::COUNTRY_STREAM, &cfg).unwrap(), oracle_pospopcnt(&crate::COUNTRY_STREAM));
    }

    #[test]
    fn auto_dispatch_boundary() {
        let cfg = PospopcntConfig::default();
        let w = words(4096);
        assert_eq!(pospopcnt(&w[..4095], &cfg).unwrap(), oracle_pospopcnt(&w[..4095]));
        assert_eq!(pospopcnt(&w, &cfg).unwrap(), oracle_pospopcnt(&w));
    }

    #[test]
    fn scalar_and_csa16_agree() {
        let w = words(10_007);
        let scalar = pospopcnt(&w, &PospopcntConfig::with_kernel(KernelKind::ScalarBasic)).unwrap();
        let csa = pospopcnt(&w, &PospopcntConfig::with_kernel(KernelKind::Csa16)).unwrap();
        assert_eq!(scalar, csa);
        assert_eq!(scalar, oracle_pospopcnt(&w));
    }

    #[test]
    fn parallel_merges_chunks() {
        let w = words(50_000);
        let cfg = PospopcntConfig::default();
        for t in [1, 2, 3, 8] {
            assert_eq!(pospopcnt_parallel(&w, &cfg, t).unwrap(), oracle_pospopcnt(&w));
        }
        assert_eq!(pospopcnt_parallel(&[], &cfg, 4).unwrap(), PositionalCounts::zero());
    }
}
