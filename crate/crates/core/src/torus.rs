//! Square toroidal arrays and the Pascal/affine tiling constructions.
//!
//! Coordinates are `(line, column)` everywhere: the first index is the row.
//! Tile `k` lands at `(odd_bits(k)·n, even_bits(k)·n)`, so the odd bits of a
//! tile index select its row and the even bits its column. All reads wrap
//! modulo the side, so every position anchors a window.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::pascal::{build_variant, PascalLikeMatrix, RotationProfile};
use crate::tiles::{even_bits, matrix_from_index, odd_bits};

const WORD_BITS: usize = 64;

/// Window height and width of a perfectness query.
#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize, serde::Deserialize)]
pub struct WindowSpec {
    pub rows: usize,
    pub cols: usize,
}

impl WindowSpec {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("window sides must be positive".into()));
        }
        Ok(WindowSpec { rows, cols })
    }

    pub fn area(&self) -> usize {
        self.rows * self.cols
    }
}

impl fmt::Display for WindowSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

/// Row and column moduli partitioning positions into residue classes.
#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize, serde::Deserialize)]
pub struct Modulo {
    pub rows: usize,
    pub cols: usize,
}

impl Modulo {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("moduli must be positive".into()));
        }
        Ok(Modulo { rows, cols })
    }

    pub fn classes(&self) -> usize {
        self.rows * self.cols
    }
}

impl fmt::Display for Modulo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.rows, self.cols)
    }
}

/// A square binary array with wrap-around indexing, bit-packed by rows.
#[derive(Clone, PartialEq, Eq)]
pub struct ToroidalArray {
    side: usize,
    words_per_row: usize,
    words: Vec<u64>,
}

impl ToroidalArray {
    pub fn zeros(side: usize) -> Self {
        let words_per_row = side.div_ceil(WORD_BITS).max(1);
        ToroidalArray {
            side,
            words_per_row,
            words: vec![0; side * words_per_row],
        }
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let side = rows.len();
        let mut a = ToroidalArray::zeros(side);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != side {
                return Err(Error::DimensionMismatch(format!(
                    "row {r} has {} entries, expected {side} (array must be square)",
                    row.len()
                )));
            }
            for (c, &bit) in row.iter().enumerate() {
                a.set_raw(r, c, bit != 0);
            }
        }
        Ok(a)
    }

    pub fn side(&self) -> usize {
        self.side
    }

    /// Cell read with toroidal wrap-around.
    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bit(row % self.side, col % self.side)
    }

    /// Cell read for indices already in range; the verifier's hot loop.
    #[inline]
    pub fn bit(&self, row: usize, col: usize) -> bool {
        debug_assert!(row < self.side && col < self.side);
        let w = row * self.words_per_row + col / WORD_BITS;
        (self.words[w] >> (col % WORD_BITS)) & 1 == 1
    }

    #[inline]
    fn set_raw(&mut self, row: usize, col: usize, value: bool) {
        let w = row * self.words_per_row + col / WORD_BITS;
        if value {
            self.words[w] |= 1 << (col % WORD_BITS);
        } else {
            self.words[w] &= !(1 << (col % WORD_BITS));
        }
    }

    /// The `rows × cols` window anchored at `pos`, read with wrap-around.
    pub fn window_at(&self, pos: (usize, usize), w: WindowSpec) -> BitMatrix {
        BitMatrix::from_fn(w.rows, w.cols, |i, j| self.get(pos.0 + i, pos.1 + j))
    }

    /// Number of cells set to 1.
    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// XOR-tiles `z` over the whole array (the array side must be a multiple
    /// of the tile side).
    pub fn xor_tiled(&self, z: &BitMatrix) -> Result<ToroidalArray> {
        if !z.is_square() || z.rows() == 0 || self.side % z.rows() != 0 {
            return Err(Error::DimensionMismatch(format!(
                "cannot tile a {}x{} block over a side-{} array",
                z.rows(),
                z.cols(),
                self.side
            )));
        }
        let n = z.rows();
        let mut out = self.clone();
        for r in 0..self.side {
            for c in 0..self.side {
                if z.get(r % n, c % n) {
                    out.set_raw(r, c, !self.bit(r, c));
                }
            }
        }
        Ok(out)
    }

    /// The non-overlapping `part_side`-aligned blocks, each copied out as a
    /// standalone toroidal array with its own wrap-around, paired with its
    /// anchor position. `part_side` must divide the side.
    pub fn aligned_subarrays(&self, part_side: usize) -> Result<Vec<((usize, usize), ToroidalArray)>> {
        if part_side == 0 || self.side % part_side != 0 {
            return Err(Error::InvalidArgument(format!(
                "part side {part_side} does not divide array side {}",
                self.side
            )));
        }
        let per_axis = self.side / part_side;
        let mut parts = Vec::with_capacity(per_axis * per_axis);
        for pr in 0..per_axis {
            for pc in 0..per_axis {
                let anchor = (pr * part_side, pc * part_side);
                let mut part = ToroidalArray::zeros(part_side);
                for r in 0..part_side {
                    for c in 0..part_side {
                        part.set_raw(r, c, self.bit(anchor.0 + r, anchor.1 + c));
                    }
                }
                parts.push((anchor, part));
            }
        }
        Ok(parts)
    }

    /// One `part_side`-aligned block by its part index.
    pub fn aligned_subarray(&self, part_side: usize, part: (usize, usize)) -> Result<ToroidalArray> {
        if part_side == 0 || self.side % part_side != 0 {
            return Err(Error::InvalidArgument(format!(
                "part side {part_side} does not divide array side {}",
                self.side
            )));
        }
        let per_axis = self.side / part_side;
        if part.0 >= per_axis || part.1 >= per_axis {
            return Err(Error::OutOfBounds(format!(
                "part {:?} outside the {per_axis}x{per_axis} subdivision",
                part
            )));
        }
        let mut out = ToroidalArray::zeros(part_side);
        for r in 0..part_side {
            for c in 0..part_side {
                out.set_raw(r, c, self.bit(part.0 * part_side + r, part.1 * part_side + c));
            }
        }
        Ok(out)
    }

    pub fn rows_as_strings(&self) -> Vec<String> {
        (0..self.side)
            .map(|r| (0..self.side).map(|c| if self.bit(r, c) { '1' } else { '0' }).collect())
            .collect()
    }

    /// 128-bit FNV-1a content digest; census distinctness confirms equality
    /// on the full arrays whenever digests collide.
    pub fn digest(&self) -> u128 {
        const OFFSET: u128 = 0x6c62272e07bb014262b821756295c58d;
        const PRIME: u128 = 0x0000000001000000000000000000013B;
        let mut h = OFFSET;
        h ^= self.side as u128;
        h = h.wrapping_mul(PRIME);
        for &w in &self.words {
            for shift in [0u32, 32] {
                h ^= u128::from((w >> shift) as u32);
                h = h.wrapping_mul(PRIME);
            }
        }
        h
    }
}

impl fmt::Debug for ToroidalArray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ToroidalArray side={}", self.side)?;
        for row in self.rows_as_strings() {
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

/// An array under construction by non-overlapping tile placement.
pub struct TileCanvas {
    array: ToroidalArray,
    occupied: Vec<bool>,
    placed_cells: usize,
}

impl TileCanvas {
    pub fn new(side: usize) -> Self {
        TileCanvas {
            array: ToroidalArray::zeros(side),
            occupied: vec![false; side * side],
            placed_cells: 0,
        }
    }

    /// Copies `tile` with its upper-left corner at `pos`. The tile must fit
    /// without wrapping and must not touch any previously placed cell.
    pub fn place_tile(&mut self, pos: (usize, usize), tile: &BitMatrix) -> Result<()> {
        let side = self.array.side();
        if pos.0 + tile.rows() > side || pos.1 + tile.cols() > side {
            return Err(Error::OutOfBounds(format!(
                "tile {}x{} at {:?} does not fit in side {side} without wrapping",
                tile.rows(),
                tile.cols(),
                pos
            )));
        }
        for i in 0..tile.rows() {
            for j in 0..tile.cols() {
                if self.occupied[(pos.0 + i) * side + pos.1 + j] {
                    return Err(Error::TileOverlap(format!(
                        "cell ({},{}) already placed",
                        pos.0 + i,
                        pos.1 + j
                    )));
                }
            }
        }
        for i in 0..tile.rows() {
            for j in 0..tile.cols() {
                self.occupied[(pos.0 + i) * side + pos.1 + j] = true;
                self.array.set_raw(pos.0 + i, pos.1 + j, tile.get(i, j));
            }
        }
        self.placed_cells += tile.rows() * tile.cols();
        Ok(())
    }

    /// Current state of the array, including unplaced (zero) cells.
    pub fn array(&self) -> &ToroidalArray {
        &self.array
    }

    /// Finishes construction; every cell must have been placed exactly once.
    pub fn finish(self) -> Result<ToroidalArray> {
        let total = self.array.side() * self.array.side();
        if self.placed_cells != total {
            return Err(Error::TileOverlap(format!(
                "construction incomplete: {} of {total} cells placed",
                self.placed_cells
            )));
        }
        Ok(self.array)
    }
}

/// Selects one affine array: the variant matrix, the XOR offset `z`, and the
/// exponent fixing the tile size `n = 2^d`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AffineSpec {
    d: u32,
    profile: RotationProfile,
    z: BitMatrix,
}

impl AffineSpec {
    pub fn new(d: u32, profile: RotationProfile, z: BitMatrix) -> Result<Self> {
        let n = 1usize << d;
        if profile.len() != n {
            return Err(Error::InvalidProfile(format!(
                "profile length {} does not match 2^{d} = {n}",
                profile.len()
            )));
        }
        if z.rows() != n || z.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "offset matrix is {}x{}, expected {n}x{n}",
                z.rows(),
                z.cols()
            )));
        }
        Ok(AffineSpec { d, profile, z })
    }

    /// The Pascal array selector: zero profile, zero offset.
    pub fn pascal(d: u32) -> Result<Self> {
        let n = 1usize << d;
        AffineSpec::new(d, RotationProfile::zero(n)?, BitMatrix::zeros(n, n))
    }

    pub fn exponent(&self) -> u32 {
        self.d
    }

    pub fn tile_side(&self) -> usize {
        1 << self.d
    }

    pub fn profile(&self) -> &RotationProfile {
        &self.profile
    }

    pub fn offset(&self) -> &BitMatrix {
        &self.z
    }

    pub fn variant(&self) -> Result<PascalLikeMatrix> {
        build_variant(self.d, self.profile.clone())
    }
}

/// Side of the array built from `n × n` tiles: `n · 2^{n²/2}`.
pub fn array_side(d: u32) -> Result<usize> {
    feasible_exponent(d)?;
    let n = 1usize << d;
    Ok(n << (n * n / 2))
}

fn feasible_exponent(d: u32) -> Result<()> {
    match d {
        1 | 2 => Ok(()),
        0 => Err(Error::InvalidArgument(
            "tile side 1 is not supported: the construction needs n >= 2".into(),
        )),
        _ => {
            let n = 1u128 << d;
            let log2_side = d as u128 + n * n / 2;
            Err(Error::SizeCap(format!(
                "array for d={d} would have side 2^{log2_side} (about {} cells per row); only d in {{1, 2}} is feasible",
                if log2_side < 127 { (1u128 << log2_side).to_string() } else { format!("2^{log2_side}") }
            )))
        }
    }
}

/// Builds the affine array: tile `M·N_k ⊕ Z` at `(odd(k)·n, even(k)·n)` for
/// every `k`, each `n × n` matrix appearing exactly once as `M·N_k`.
pub fn build_affine_array(spec: &AffineSpec) -> Result<ToroidalArray> {
    feasible_exponent(spec.exponent())?;
    let n = spec.tile_side();
    let side = array_side(spec.exponent())?;
    let m = spec.variant()?;
    let mut canvas = TileCanvas::new(side);
    for k in 0..(1u64 << (n * n)) {
        let tile = m.matrix().mul(&matrix_from_index(n, k)?)?.xor(spec.offset())?;
        let pos = (odd_bits(k) as usize * n, even_bits(k) as usize * n);
        canvas.place_tile(pos, &tile)?;
    }
    canvas.finish()
}

/// The Pascal toroidal array: the affine array with zero profile and offset.
pub fn build_pascal_array(d: u32) -> Result<ToroidalArray> {
    build_affine_array(&AffineSpec::pascal(d)?)
}
