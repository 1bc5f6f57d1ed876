//! Integer ↔ `n × n` matrix enumeration and the even/odd bit split.
//!
//! The enumeration writes the `n²`-bit binary expansion of `k` into the
//! matrix row-major, most significant digit at entry `(0,0)`: entry `(i,j)`
//! is bit `n² - 1 - i·n - j` of `k`, with bit 0 the least significant digit.
//! Tile placement de-interleaves `k` into its odd-position bits (tile row)
//! and even-position bits (tile column); `join` is the inverse interleave.

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

/// Number of `n × n` tiles, `2^{n²}`, as a u128 (overflows u64 at n = 8).
pub fn tile_count(n: usize) -> Result<u128> {
    let bits = n * n;
    if bits > 127 {
        return Err(Error::SizeCap(format!("2^{bits} tile indices are not representable")));
    }
    Ok(1u128 << bits)
}

/// The matrix whose entries are the binary digits of `k`, row-major with the
/// most significant digit first.
pub fn matrix_from_index(n: usize, k: u64) -> Result<BitMatrix> {
    let bits = n * n;
    if bits > 64 {
        return Err(Error::SizeCap(format!(
            "{n}x{n} tile indices need {bits} bits; only up to 64 are supported"
        )));
    }
    if bits < 64 && k >> bits != 0 {
        return Err(Error::OutOfBounds(format!("tile index {k} is not below 2^{bits}")));
    }
    Ok(BitMatrix::from_fn(n, n, |i, j| {
        (k >> (bits - 1 - i * n - j)) & 1 == 1
    }))
}

/// Inverse of [`matrix_from_index`]; rejects non-square input.
pub fn index_from_matrix(m: &BitMatrix) -> Result<u64> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "tile index of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let bits = n * n;
    if bits > 64 {
        return Err(Error::SizeCap(format!("{bits}-bit tile index does not fit in 64 bits")));
    }
    let mut k = 0u64;
    for i in 0..n {
        for j in 0..n {
            if m.get(i, j) {
                k |= 1 << (bits - 1 - i * n - j);
            }
        }
    }
    Ok(k)
}

/// The integer formed by the bits of `k` at even positions (position 0 = least
/// significant).
pub fn even_bits(mut k: u64) -> u64 {
    let mut out = 0;
    let mut i = 0;
    while k != 0 {
        out |= (k & 1) << i;
        k >>= 2;
        i += 1;
    }
    out
}

/// The integer formed by the bits of `k` at odd positions.
pub fn odd_bits(k: u64) -> u64 {
    even_bits(k >> 1)
}

/// Interleaves `l` into the odd and `m` into the even bit positions: the
/// unique `k` with `odd_bits(k) = l` and `even_bits(k) = m`.
///
/// Panics when either argument has bits above position 31 (the interleave
/// would not fit in 64 bits).
pub fn join(l: u64, m: u64) -> u64 {
    assert!(l >> 32 == 0 && m >> 32 == 0, "join arguments must fit in 32 bits");
    spread(m) | spread(l) << 1
}

/// Spaces the low 32 bits of `v` out to even positions.
fn spread(v: u64) -> u64 {
    let mut v = v & 0xFFFF_FFFF;
    v = (v | v << 16) & 0x0000_FFFF_0000_FFFF;
    v = (v | v << 8) & 0x00FF_00FF_00FF_00FF;
    v = (v | v << 4) & 0x0F0F_0F0F_0F0F_0F0F;
    v = (v | v << 2) & 0x3333_3333_3333_3333;
    (v | v << 1) & 0x5555_5555_5555_5555
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The sixteen 2x2 matrices in enumeration order.
    fn all_2x2() -> Vec<BitMatrix> {
        let rows: [[u8; 4]; 16] = [
            [0, 0, 0, 0],
            [0, 0, 0, 1],
            [0, 0, 1, 0],
            [0, 0, 1, 1],
            [0, 1, 0, 0],
            [0, 1, 0, 1],
            [0, 1, 1, 0],
            [0, 1, 1, 1],
            [1, 0, 0, 0],
            [1, 0, 0, 1],
            [1, 0, 1, 0],
            [1, 0, 1, 1],
            [1, 1, 0, 0],
            [1, 1, 0, 1],
            [1, 1, 1, 0],
            [1, 1, 1, 1],
        ];
        rows.iter()
            .map(|r| BitMatrix::from_rows(&[vec![r[0], r[1]], vec![r[2], r[3]]]))
            .collect()
    }

    #[test]
    fn enumeration_matches_reference_list() {
        for (k, expect) in all_2x2().into_iter().enumerate() {
            assert_eq!(matrix_from_index(2, k as u64).unwrap(), expect, "k={k}");
        }
    }

    #[test]
    fn index_round_trip() {
        for k in 0..16u64 {
            let m = matrix_from_index(2, k).unwrap();
            assert_eq!(index_from_matrix(&m).unwrap(), k);
        }
        assert_eq!(
            index_from_matrix(&BitMatrix::from_rows(&[vec![0, 0], vec![0, 1]])).unwrap(),
            1
        );
        assert_eq!(
            index_from_matrix(&BitMatrix::from_rows(&[vec![1, 0], vec![0, 0]])).unwrap(),
            8
        );
    }

    #[test]
    fn enumeration_rejects_bad_input() {
        assert!(matrix_from_index(2, 16).is_err());
        assert!(index_from_matrix(&BitMatrix::zeros(2, 3)).is_err());
        assert!(matrix_from_index(9, 0).is_err());
    }

    #[test]
    fn bit_split_values() {
        assert_eq!((even_bits(0), odd_bits(0)), (0, 0));
        assert_eq!((even_bits(6), odd_bits(6)), (2, 1));
        assert_eq!((even_bits(5), odd_bits(5)), (3, 0));
    }

    #[test]
    fn join_values() {
        assert_eq!(join(0, 0), 0);
        assert_eq!(join(1, 2), 6);
    }

    #[test]
    fn join_inverts_the_split() {
        for l in 0..256u64 {
            for m in 0..256u64 {
                let k = join(l, m);
                assert_eq!(odd_bits(k), l);
                assert_eq!(even_bits(k), m);
            }
        }
    }

    #[test]
    fn split_join_round_trip_is_a_bijection() {
        // restricted below 2^{n²}, the split maps onto pairs below 2^{n²/2}
        let n = 2usize;
        let mut seen = [false; 16];
        for k in 0..16u64 {
            let (l, m) = (odd_bits(k), even_bits(k));
            assert!(l < 4 && m < 4);
            let idx = (l * 4 + m) as usize;
            assert!(!seen[idx], "pair collision at k={k}");
            seen[idx] = true;
            assert_eq!(join(l, m), k);
        }
        assert!(seen.iter().all(|&s| s));
        let _ = n;
    }
}
