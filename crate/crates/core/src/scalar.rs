use crate::counts::PositionalCounts;

macro_rules! shift_mask_add {
    ($c:ident, $w:ident; $($p:literal)*) => {
        $( $c[$p] += (($w >> $p) & 1) as u64; )*
    };
}

/// Shift-mask-add baseline: sixteen branchless counter updates per word.
///
/// Built without auto-vectorization (see `.cargo/config.toml`) so that the
/// benchmarked baseline is genuinely scalar.
pub fn pospopcnt_scalar_basic(words: &[u16]) -> PositionalCounts {
    let mut c = [0u64; 16];
    for &w in words {
        shift_mask_add!(c, w; 0 1 2 3 4 5 6 7 8 9 10 11 12 13 14 15);
    }
    PositionalCounts(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_pospopcnt;

    #[test]
    fn matches_oracle() {
        assert_eq!(pospopcnt_scalar_basic(&[]), PositionalCounts::zero());
        assert_eq!(
            pospopcnt_scalar_basic(&crate::COUNTRY_STREAM),
            oracle_pospopcnt(&crate::COUNTRY_STREAM)
        );
        let words: Vec<u16> = (0..1000u32).map(|i| (i.wrapping_mul(2654435761) >> 16) as u16).collect();
        assert_eq!(pospopcnt_scalar_basic(&words), oracle_pospopcnt(&words));
    }
}
