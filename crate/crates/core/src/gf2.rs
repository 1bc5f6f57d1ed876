//! Dense linear algebra over the two-element field.
//!
//! Rows are packed into 64-bit words, least-significant bit = column 0, and
//! padding bits above the logical width are kept at zero so that equality,
//! hashing and word-wise XOR never see garbage. Values are immutable from the
//! caller's perspective once built; all operations hand back fresh values and
//! may run on shared references from any number of threads.

use std::fmt;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// A fixed-length vector of GF(2) entries.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b != 0);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range 0..{}", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range 0..{}", self.len);
        let (w, b) = (i / WORD_BITS, i % WORD_BITS);
        if value {
            self.words[w] |= 1 << b;
        } else {
            self.words[w] &= !(1 << b);
        }
    }

    /// Cyclic rotation moving the last entry to the front, applied `m` times:
    /// `(a_0, …, a_{n-1}) ↦ (a_{n-1}, a_0, …, a_{n-2})`. A full cycle of `n`
    /// applications is the identity.
    pub fn rotate(&self, m: usize) -> BitVec {
        if self.len == 0 {
            return self.clone();
        }
        let shift = m % self.len;
        let mut out = BitVec::zeros(self.len);
        for i in 0..self.len {
            out.set((i + shift) % self.len, self.get(i));
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            write!(f, "{}", u8::from(b))?;
        }
        Ok(())
    }
}

/// A dense matrix over GF(2) with word-packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = words_for(cols);
        BitMatrix {
            rows,
            cols,
            words_per_row,
            words: vec![0; rows * words_per_row],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds from explicit 0/1 rows; every row must have the same length.
    pub fn from_rows(rows: &[Vec<u8>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = BitMatrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged row {i}");
            for (j, &bit) in row.iter().enumerate() {
                m.set(i, j, bit != 0);
            }
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = BitMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols, "entry ({i},{j}) out of {}x{}", self.rows, self.cols);
        let w = i * self.words_per_row + j / WORD_BITS;
        (self.words[w] >> (j % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.rows && j < self.cols, "entry ({i},{j}) out of {}x{}", self.rows, self.cols);
        let w = i * self.words_per_row + j / WORD_BITS;
        if value {
            self.words[w] |= 1 << (j % WORD_BITS);
        } else {
            self.words[w] &= !(1 << (j % WORD_BITS));
        }
    }

    #[inline]
    fn row_words(&self, i: usize) -> &[u64] {
        &self.words[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    fn xor_row_from(&mut self, dst: usize, src_words: &[u64]) {
        let base = dst * self.words_per_row;
        for (k, &w) in src_words.iter().enumerate() {
            self.words[base + k] ^= w;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn column(&self, j: usize) -> BitVec {
        assert!(j < self.cols);
        let mut v = BitVec::zeros(self.rows);
        for i in 0..self.rows {
            v.set(i, self.get(i, j));
        }
        v
    }

    pub fn set_column(&mut self, j: usize, v: &BitVec) {
        assert_eq!(v.len(), self.rows, "column length mismatch");
        for i in 0..self.rows {
            self.set(i, j, v.get(i));
        }
    }

    /// Matrix product with AND as multiplication and XOR as addition.
    pub fn mul(&self, rhs: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = BitMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            // accumulate the XOR of rhs rows selected by the set bits of row i
            for (wi, &word) in self.row_words(i).iter().enumerate() {
                let mut w = word;
                while w != 0 {
                    let x = wi * WORD_BITS + w.trailing_zeros() as usize;
                    out.xor_row_from(i, rhs.row_words(x));
                    w &= w - 1;
                }
            }
        }
        Ok(out)
    }

    /// Entry-wise XOR.
    pub fn xor(&self, rhs: &BitMatrix) -> Result<BitMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = self.clone();
        for (w, &r) in out.words.iter_mut().zip(rhs.words.iter()) {
            *w ^= r;
        }
        Ok(out)
    }

    /// Inverse by Gaussian elimination on `[A | I]`. `None` means singular;
    /// a verdict rather than an error because invertibility sweeps assert it
    /// across thousands of submatrices.
    ///
    /// Panics when the matrix is not square.
    pub fn inverse(&self) -> Option<BitMatrix> {
        assert!(self.is_square(), "inverse of a {}x{} matrix", self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = BitMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| a.get(r, col))?;
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            for r in 0..n {
                if r != col && a.get(r, col) {
                    let src = a.row_words(col).to_vec();
                    a.xor_row_from(r, &src);
                    let src = inv.row_words(col).to_vec();
                    inv.xor_row_from(r, &src);
                }
            }
        }
        Some(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Row rank over GF(2).
    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..a.cols {
            if let Some(pivot) = (rank..a.rows).find(|&r| a.get(r, col)) {
                a.swap_rows(pivot, rank);
                let src = a.row_words(rank).to_vec();
                for r in 0..a.rows {
                    if r != rank && a.get(r, col) {
                        a.xor_row_from(r, &src);
                    }
                }
                rank += 1;
                if rank == a.rows {
                    break;
                }
            }
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.words_per_row {
            self.words.swap(a * self.words_per_row + k, b * self.words_per_row + k);
        }
    }

    /// Contiguous block copy; rejects ranges leaving the matrix.
    pub fn submatrix(&self, row_start: usize, col_start: usize, rows: usize, cols: usize) -> Result<BitMatrix> {
        if row_start + rows > self.rows || col_start + cols > self.cols {
            return Err(Error::OutOfBounds(format!(
                "block {rows}x{cols} at ({row_start},{col_start}) exceeds {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(BitMatrix::from_fn(rows, cols, |i, j| {
            self.get(row_start + i, col_start + j)
        }))
    }

    /// Solves `self · x = rhs` for invertible square `self`.
    pub fn solve(&self, rhs: &BitVec) -> Option<BitVec> {
        assert_eq!(rhs.len(), self.rows, "rhs length mismatch");
        let inv = self.inverse()?;
        let mut x = BitVec::zeros(self.rows);
        for i in 0..self.rows {
            let mut acc = false;
            for j in 0..self.cols {
                acc ^= inv.get(i, j) & rhs.get(j);
            }
            x.set(i, acc);
        }
        Some(x)
    }

    /// Rows rendered as strings of `0`/`1`, used by reports and fixtures.
    pub fn to_row_strings(&self) -> Vec<String> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| if self.get(i, j) { '1' } else { '0' }).collect())
            .collect()
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for row in self.to_row_strings() {
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.to_row_strings().iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let spaced: Vec<String> = row.chars().map(String::from).collect();
            write!(f, "{}", spaced.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m1() -> BitMatrix {
        BitMatrix::from_rows(&[vec![1, 1], vec![0, 1]])
    }

    fn m2() -> BitMatrix {
        BitMatrix::from_rows(&[
            vec![1, 1, 1, 1],
            vec![0, 1, 0, 1],
            vec![0, 0, 1, 1],
            vec![0, 0, 0, 1],
        ])
    }

    #[test]
    fn mul_small_products() {
        let n1 = BitMatrix::from_rows(&[vec![0, 0], vec![0, 1]]);
        let got = m1().mul(&n1).unwrap();
        assert_eq!(got, BitMatrix::from_rows(&[vec![0, 1], vec![0, 1]]));

        let n4 = BitMatrix::from_rows(&[vec![0, 1], vec![0, 0]]);
        let got = m1().mul(&n4).unwrap();
        assert_eq!(got, BitMatrix::from_rows(&[vec![0, 1], vec![0, 0]]));
    }

    #[test]
    fn mul_identity_is_neutral() {
        let x = m2();
        assert_eq!(BitMatrix::identity(4).mul(&x).unwrap(), x);
        assert_eq!(x.mul(&BitMatrix::identity(4)).unwrap(), x);
    }

    #[test]
    fn mul_rejects_dimension_mismatch() {
        let e = m1().mul(&m2()).unwrap_err();
        assert!(matches!(e, Error::DimensionMismatch(_)));
    }

    #[test]
    fn xor_self_and_zero() {
        let x = m2();
        assert!(x.xor(&x).unwrap().is_zero());
        assert_eq!(x.xor(&BitMatrix::zeros(4, 4)).unwrap(), x);
        assert!(x.xor(&m1()).is_err());
    }

    #[test]
    fn xor_of_enumerated_tiles() {
        // entry-wise sum matches the XOR of the underlying enumeration indices
        let n5 = BitMatrix::from_rows(&[vec![0, 1], vec![0, 1]]);
        let n3 = BitMatrix::from_rows(&[vec![0, 0], vec![1, 1]]);
        let n6 = BitMatrix::from_rows(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(n5.xor(&n3).unwrap(), n6);
    }

    #[test]
    fn inverse_involution_and_identity() {
        // the 2x2 Pascal matrix squares to the identity
        let inv = m1().inverse().unwrap();
        assert_eq!(inv, m1());
        assert_eq!(m1().mul(&m1()).unwrap(), BitMatrix::identity(2));

        assert_eq!(BitMatrix::identity(5).inverse().unwrap(), BitMatrix::identity(5));
    }

    #[test]
    fn inverse_singular_verdict() {
        let ones = BitMatrix::from_rows(&[vec![1, 1], vec![1, 1]]);
        assert!(ones.inverse().is_none());
        assert!(!ones.is_invertible());
    }

    #[test]
    fn rank_values() {
        assert_eq!(m2().rank(), 4);
        assert_eq!(BitMatrix::zeros(3, 3).rank(), 0);
        assert_eq!(BitMatrix::from_rows(&[vec![1, 1], vec![1, 1]]).rank(), 1);
    }

    #[test]
    fn rotate_moves_last_to_front() {
        let v = BitVec::from_bits(&[1, 0, 0, 0]);
        assert_eq!(v.rotate(1), BitVec::from_bits(&[0, 1, 0, 0]));
        assert_eq!(v.rotate(0), v);
        assert_eq!(v.rotate(4), v);
    }

    #[test]
    fn submatrix_blocks() {
        assert_eq!(m2().submatrix(0, 0, 4, 4).unwrap(), m2());
        assert_eq!(
            m2().submatrix(1, 2, 2, 2).unwrap(),
            BitMatrix::from_rows(&[vec![0, 1], vec![1, 1]])
        );
        assert_eq!(
            m2().submatrix(2, 2, 2, 2).unwrap(),
            BitMatrix::from_rows(&[vec![1, 1], vec![0, 1]])
        );
        assert!(m2().submatrix(2, 2, 3, 2).is_err());
    }

    #[test]
    fn padding_stays_clean_across_widths() {
        // widths straddling the word boundary keep equality entry-wise
        for cols in [63, 64, 65, 70] {
            let mut a = BitMatrix::zeros(2, cols);
            a.set(1, cols - 1, true);
            a.set(1, cols - 1, false);
            assert_eq!(a, BitMatrix::zeros(2, cols));
        }
    }
}
