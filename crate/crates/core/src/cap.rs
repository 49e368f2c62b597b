//! Dimension budget shared by every dense constructor.

use crate::error::{LabError, Result};

/// Default bound on the total dense dimension `d^t * dim_E`.
pub const DEFAULT_DIM_CAP: u128 = 1 << 14;

/// Environment variable that overrides [`DEFAULT_DIM_CAP`].
pub const DIM_CAP_ENV: &str = "PRU_LAB_DIM_CAP";

/// Current dimension cap, honouring `PRU_LAB_DIM_CAP` when it parses.
pub fn dim_cap() -> u128 {
    std::env::var(DIM_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u128>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_DIM_CAP)
}

/// `base^exp`, or `None` on overflow.
pub fn checked_pow(base: usize, exp: usize) -> Option<u128> {
    (base as u128).checked_pow(exp as u32)
}

/// Checks `d^t * extra` against the cap and returns it as `usize`.
pub fn check_dims(d: usize, t: usize, extra: usize) -> Result<usize> {
    let limit = dim_cap();
    let required = checked_pow(d, t)
        .and_then(|p| p.checked_mul(extra as u128))
        .unwrap_or(u128::MAX);
    if required > limit {
        return Err(LabError::capacity(
            format!("dense space of dimension {d}^{t} x {extra}"),
            required,
            limit,
        ));
    }
    Ok(required as usize)
}

/// Index of the tuple `a` in `[d]^t`, first entry most significant.
#[inline]
pub fn tuple_to_index(a: &[usize], d: usize) -> usize {
    a.iter().fold(0, |acc, &x| acc * d + x)
}

/// Inverse of [`tuple_to_index`], writing into `out`.
#[inline]
pub fn index_to_tuple(mut idx: usize, d: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = idx % d;
        idx /= d;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuple_index_roundtrip() {
        let mut buf = [0usize; 3];
        for idx in 0..64 {
            index_to_tuple(idx, 4, &mut buf);
            assert_eq!(tuple_to_index(&buf, 4), idx);
        }
        assert_eq!(tuple_to_index(&[1, 2], 4), 6);
    }

    #[test]
    fn cap_rejects_oversized_spaces() {
        assert!(check_dims(4, 2, 4).is_ok());
        assert!(matches!(
            check_dims(2, 40, 1),
            Err(LabError::Capacity { .. })
        ));
    }
}
