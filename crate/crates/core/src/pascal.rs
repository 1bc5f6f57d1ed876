//! The Pascal-triangle matrix modulo 2 and its column-rotated variants.
//!
//! `M_d` is the `2^d × 2^d` upper-triangular matrix built inductively from
//! `M_0 = (1)` by stacking `[[M_d, M_d], [0, M_d]]`; its upper part is the
//! Sierpiński-triangle pattern. A variant rotates each column `j` cyclically
//! downward by `m_j` steps, where the rotation counts decrease to
//! `m_{n-1} = 0` with adjacent differences in `{0, 1}`. Every variant keeps
//! the two invertibility properties the decoder relies on: right-anchored row
//! blocks are invertible, and so is any square block whose top-right entry
//! sits on the upper border.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

/// Largest supported exponent for matrix construction (1024 columns). Arrays
/// cap out far below this; the limit only guards against runaway requests.
pub const MAX_EXPONENT: u32 = 10;

/// Builds the `2^d × 2^d` Pascal matrix modulo 2.
pub fn build_pascal(d: u32) -> Result<BitMatrix> {
    if d > MAX_EXPONENT {
        return Err(Error::SizeCap(format!(
            "matrix exponent {d} exceeds the supported maximum {MAX_EXPONENT}"
        )));
    }
    let mut m = BitMatrix::identity(1);
    for step in 0..d {
        let half = 1usize << step;
        let next = BitMatrix::from_fn(2 * half, 2 * half, |i, j| {
            if i < half {
                if j < half {
                    m.get(i, j)
                } else {
                    m.get(i, j - half)
                }
            } else if j < half {
                false
            } else {
                m.get(i - half, j - half)
            }
        });
        m = next;
    }
    Ok(m)
}

/// The per-column rotation counts `m_0, …, m_{n-1}` selecting one variant.
///
/// Valid profiles end in `m_{n-1} = 0` and step down by 0 or 1 between
/// adjacent entries, so each is equivalent to its difference vector in
/// `{0,1}^{n-1}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RotationProfile {
    counts: Vec<usize>,
}

impl RotationProfile {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        let n = counts.len();
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::InvalidProfile(format!(
                "length {n} is not a power of two"
            )));
        }
        if counts[n - 1] != 0 {
            return Err(Error::InvalidProfile(format!(
                "last rotation count must be 0, got {}",
                counts[n - 1]
            )));
        }
        for i in 0..n - 1 {
            let diff = counts[i] as i64 - counts[i + 1] as i64;
            if diff != 0 && diff != 1 {
                return Err(Error::InvalidProfile(format!(
                    "adjacent counts may differ by 0 or 1, got m_{i}={} and m_{}={}",
                    counts[i],
                    i + 1,
                    counts[i + 1]
                )));
            }
        }
        Ok(RotationProfile { counts })
    }

    /// The all-zero profile selecting the plain Pascal matrix.
    pub fn zero(n: usize) -> Result<Self> {
        RotationProfile::new(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn count(&self, j: usize) -> usize {
        self.counts[j]
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn is_zero(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    /// Profile from its difference vector read as a binary counter: bit `i`
    /// of `value` is `m_i - m_{i+1}`.
    pub fn from_difference_bits(n: usize, value: u64) -> Result<Self> {
        if !n.is_power_of_two() || n == 0 {
            return Err(Error::InvalidProfile(format!(
                "length {n} is not a power of two"
            )));
        }
        if n > 64 || (n < 64 && value >> (n - 1) != 0) {
            return Err(Error::InvalidProfile(format!(
                "difference value {value} out of range for n={n}"
            )));
        }
        let mut counts = vec![0usize; n];
        for i in (0..n - 1).rev() {
            counts[i] = counts[i + 1] + ((value >> i) & 1) as usize;
        }
        RotationProfile::new(counts)
    }
}

impl fmt::Debug for RotationProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RotationProfile{:?}", self.counts)
    }
}

impl fmt::Display for RotationProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.counts.iter().map(usize::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// All `2^{n-1}` valid profiles of length `n`, ordered by their difference
/// vectors read as ascending binary counters. The order is the census and
/// enumeration order everywhere in this crate.
pub fn enumerate_profiles(n: usize) -> Result<Vec<RotationProfile>> {
    if !n.is_power_of_two() || n == 0 {
        return Err(Error::InvalidProfile(format!(
            "length {n} is not a power of two"
        )));
    }
    if n > 32 {
        return Err(Error::SizeCap(format!(
            "refusing to enumerate 2^{} profiles",
            n - 1
        )));
    }
    (0..1u64 << (n - 1))
        .map(|v| RotationProfile::from_difference_bits(n, v))
        .collect()
}

/// A column-rotated Pascal matrix together with the profile that produced it.
#[derive(Clone, PartialEq, Eq)]
pub struct PascalLikeMatrix {
    d: u32,
    profile: RotationProfile,
    matrix: BitMatrix,
}

impl PascalLikeMatrix {
    pub fn exponent(&self) -> u32 {
        self.d
    }

    pub fn size(&self) -> usize {
        1 << self.d
    }

    pub fn profile(&self) -> &RotationProfile {
        &self.profile
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    /// Row of the topmost 1 in column `j`.
    pub fn upper_border(&self, j: usize) -> usize {
        self.profile.count(j)
    }

    /// Row of the bottommost 1 in column `j`; the borders in column `j` are
    /// exactly `j` rows apart.
    pub fn lower_border(&self, j: usize) -> usize {
        self.profile.count(j) + j
    }

    /// The permutation picking, per column, the border row whose entries left
    /// of the column are all zero: `τ(i) = m_i` when `i = 0` or
    /// `m_{i-1} = m_i + 1`, else `m_i + i`.
    pub fn tau(&self) -> Vec<usize> {
        let n = self.size();
        (0..n)
            .map(|i| {
                if i == 0 || self.profile.count(i - 1) == self.profile.count(i) + 1 {
                    self.profile.count(i)
                } else {
                    self.profile.count(i) + i
                }
            })
            .collect()
    }

    /// The `k × k` block on rows `l..l+k` and the last `k` columns; always
    /// invertible.
    pub fn right_submatrix(&self, l: usize, k: usize) -> Result<BitMatrix> {
        let n = self.size();
        if k == 0 || l + k > n {
            return Err(Error::OutOfBounds(format!(
                "right block rows {l}..{} of an {n}x{n} matrix",
                l + k
            )));
        }
        self.matrix.submatrix(l, n - k, k, k)
    }

    /// The `k × k` block at `(row_start, col_start)` whose top-right entry
    /// lies on the upper border; always invertible. Rejects blocks whose
    /// top-right corner is off the border.
    pub fn top_border_submatrix(&self, row_start: usize, col_start: usize, k: usize) -> Result<BitMatrix> {
        let n = self.size();
        if k == 0 || row_start + k > n || col_start + k > n {
            return Err(Error::OutOfBounds(format!(
                "border block {k}x{k} at ({row_start},{col_start}) of an {n}x{n} matrix"
            )));
        }
        let corner_col = col_start + k - 1;
        if self.upper_border(corner_col) != row_start {
            return Err(Error::InvalidArgument(format!(
                "top-right corner ({row_start},{corner_col}) is not on the upper border (row {})",
                self.upper_border(corner_col)
            )));
        }
        self.matrix.submatrix(row_start, col_start, k, k)
    }

    /// Mirror of [`top_border_submatrix`]: the `k × k` block of consecutive
    /// rows and columns whose bottom-right entry lies on the lower border of
    /// column `col_end`; always invertible.
    ///
    /// [`top_border_submatrix`]: Self::top_border_submatrix
    pub fn bottom_border_submatrix(&self, col_end: usize, k: usize) -> Result<BitMatrix> {
        let n = self.size();
        if k == 0 || col_end >= n || col_end + 1 < k {
            return Err(Error::OutOfBounds(format!(
                "border block {k}x{k} ending at column {col_end} of an {n}x{n} matrix"
            )));
        }
        let row_end = self.lower_border(col_end);
        if row_end + 1 < k {
            return Err(Error::OutOfBounds(format!(
                "border block {k}x{k} would start above row 0 (lower border at {row_end})"
            )));
        }
        self.matrix.submatrix(row_end + 1 - k, col_end + 1 - k, k, k)
    }
}

impl fmt::Debug for PascalLikeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PascalLikeMatrix(d={}, profile={})", self.d, self.profile)
    }
}

/// Builds the variant of `M_d` whose column `j` is rotated by `m_j` steps.
pub fn build_variant(d: u32, profile: RotationProfile) -> Result<PascalLikeMatrix> {
    let n = 1usize << d;
    if profile.len() != n {
        return Err(Error::InvalidProfile(format!(
            "profile length {} does not match 2^{d} = {n}",
            profile.len()
        )));
    }
    let base = build_pascal(d)?;
    let mut matrix = BitMatrix::zeros(n, n);
    for j in 0..n {
        matrix.set_column(j, &base.column(j).rotate(profile.count(j)));
    }
    Ok(PascalLikeMatrix { d, profile, matrix })
}
