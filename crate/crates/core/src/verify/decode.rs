//! Pattern location by solving GF(2) linear systems instead of scanning.
//!
//! Within one aligned part everything about a tile index is known except its
//! bottom `k` rows, which interleave the tile's row and column coordinates
//! inside the part. A `k × n` occurrence overlaps at most four tiles; the
//! variant matrix's border structure lets us peel the unknown rows off one by
//! one (each `τ` row of the matrix has a single leading 1), and finish with
//! one border-anchored block inversion for the rows whose `τ` value lands in
//! the dead zone the occurrence does not cover. Recovered bits flow upward
//! from the least significant row, so the `+1` neighbour tiles are resolved
//! with plain carry arithmetic.

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::tiles::{join, matrix_from_index};
use crate::torus::AffineSpec;

/// Finds the unique position, congruent to `class` modulo `(n, n)`, at which
/// `pattern` occurs in the aligned part `part` of the level-`level`
/// subdivision of the affine array for `spec`. The position is relative to
/// the part and is computed without scanning the array.
pub fn locate_pattern(
    spec: &AffineSpec,
    level: usize,
    part: (usize, usize),
    pattern: &BitMatrix,
    class: (usize, usize),
) -> Result<(usize, usize)> {
    let n = spec.tile_side();
    let k = level;
    if !(1..=n).contains(&k) {
        return Err(Error::InvalidArgument(format!(
            "level {k} outside 1..={n}"
        )));
    }
    if spec.exponent() == 0 || spec.exponent() > 2 {
        return Err(Error::SizeCap(format!(
            "no feasible array exists for d = {}",
            spec.exponent()
        )));
    }
    if pattern.rows() != k || pattern.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "pattern is {}x{}, level {k} expects {k}x{n}",
            pattern.rows(),
            pattern.cols()
        )));
    }
    let (i, j) = class;
    if i >= n || j >= n {
        return Err(Error::InvalidArgument(format!(
            "class {class:?} not below ({n},{n})"
        )));
    }
    let parts_per_axis = 1u64 << ((n - k) * n / 2);
    if part.0 as u64 >= parts_per_axis || part.1 as u64 >= parts_per_axis {
        return Err(Error::OutOfBounds(format!(
            "part {part:?} outside the {parts_per_axis}x{parts_per_axis} level-{k} subdivision"
        )));
    }

    let variant = spec.variant()?;
    let m = variant.matrix().clone();
    let z = spec.offset();
    let w = k * n / 2;

    // top n-k rows shared by every tile index of this part
    let fixed = matrix_from_index(n, join(part.0 as u64, part.1 as u64) << (k * n))?;

    let mut state = Recovery {
        n,
        k,
        w,
        row_value: 0,
        row_known: 0,
        col_value: 0,
        col_known: 0,
    };

    // pattern entry for a tile-local row `y` covered by the occurrence,
    // folded with the affine offset
    let pat_entry = |y: usize, t: usize| -> bool {
        let pr = if y >= i { y - i } else { y + (n - i) };
        let pc = if t >= j { t - j } else { t + (n - j) };
        pattern.get(pr, pc) ^ z.get(y, t)
    };

    if i + k <= n {
        // occurrence confined to one tile row: solve every column against the
        // invertible right-anchored block on rows i..i+k
        let block = variant.right_submatrix(i, k)?;
        let inv = block.inverse().ok_or_else(|| {
            Error::TheoryViolation("right-anchored block is singular".into())
        })?;
        let mut solved = vec![vec![false; n]; k];
        for t in 0..n {
            let rhs: Vec<bool> = (0..k)
                .map(|a| {
                    let y = i + a;
                    let mut acc = pat_entry(y, t);
                    for x in 0..n - k {
                        acc ^= m.get(y, x) & fixed.get(x, t);
                    }
                    acc
                })
                .collect();
            for (a, row) in solved.iter_mut().enumerate() {
                row[t] = apply_row(&inv, a, &rhs);
            }
        }
        for s in (n - k..n).rev() {
            for t in (0..n).rev() {
                state.absorb(s, t, solved[s - (n - k)][t], false, t < j)?;
            }
        }
    } else {
        let tau = variant.tau();
        let lower_end = i + k - n; // rows 0..lower_end lie in the lower tile row
        let in_bands = |y: usize| y < lower_end || y >= i;

        // cutting index: tau values strictly below it leave the covered bands
        let mut r = n - k;
        for s in (n - k..n).rev() {
            if !in_bands(tau[s]) {
                r = s + 1;
                break;
            }
        }

        // phase 1: peel rows n-1 down to r, one tau row each
        for s in (r..n).rev() {
            let y = tau[s];
            let below = y < lower_end;
            for t in (0..n).rev() {
                let mut acc = pat_entry(y, t);
                for x in s + 1..n {
                    if m.get(y, x) {
                        acc ^= state.tile_entry(&fixed, x, t, below, t < j)?;
                    }
                }
                state.absorb(s, t, acc, below, t < j)?;
            }
        }

        // phase 2: remaining rows n-k..r-1 via one anchored block inversion
        if r > n - k {
            let kp = r - (n - k);
            let band_of = |rows: &[usize]| -> Option<bool> {
                if !rows.iter().all(|&y| y < n && in_bands(y)) {
                    return None;
                }
                let below = rows[0] < lower_end;
                rows.iter().all(|&y| (y < lower_end) == below).then_some(below)
            };
            // top-right of the block on the upper border of column r-1, or
            // the mirror block with bottom-right on its lower border
            let upper_start = variant.upper_border(r - 1);
            let upper_rows: Vec<usize> = (upper_start..upper_start + kp).collect();
            let lower_last = variant.lower_border(r - 1);
            let lower_rows: Vec<usize> = (lower_last + 1 - kp..=lower_last).collect();
            let (rows, below) = if let Some(b) = band_of(&upper_rows) {
                (upper_rows, b)
            } else if let Some(b) = band_of(&lower_rows) {
                (lower_rows, b)
            } else {
                return Err(Error::TheoryViolation(format!(
                    "no border-anchored block covers rows {}..{} (profile {}, level {k}, class {class:?})",
                    n - k,
                    r,
                    spec.profile()
                )));
            };
            let block = BitMatrix::from_fn(kp, kp, |a, b| m.get(rows[a], n - k + b));
            let inv = block.inverse().ok_or_else(|| {
                Error::TheoryViolation("border-anchored block is singular".into())
            })?;
            let mut solved = vec![vec![false; n]; kp];
            for t in 0..n {
                let rhs: Vec<bool> = rows
                    .iter()
                    .map(|&y| {
                        let mut acc = pat_entry(y, t);
                        for x in 0..n - k {
                            acc ^= m.get(y, x) & fixed.get(x, t);
                        }
                        for x in r..n {
                            if m.get(y, x) {
                                acc ^= state.tile_entry(&fixed, x, t, below, t < j)?;
                            }
                        }
                        Ok(acc)
                    })
                    .collect::<Result<_>>()?;
                for (a, row) in solved.iter_mut().enumerate() {
                    row[t] = apply_row(&inv, a, &rhs);
                }
            }
            for s in (n - k..r).rev() {
                for t in (0..n).rev() {
                    state.absorb(s, t, solved[s - (n - k)][t], below, t < j)?;
                }
            }
        }
    }

    let (tile_row, tile_col) = state.finish()?;
    Ok((tile_row as usize * n + i, tile_col as usize * n + j))
}

/// GF(2) dot product of one matrix row with a bool vector.
fn apply_row(m: &BitMatrix, row: usize, v: &[bool]) -> bool {
    let mut acc = false;
    for (col, &bit) in v.iter().enumerate() {
        acc ^= m.get(row, col) & bit;
    }
    acc
}

/// Bit-level reconstruction of the within-part tile coordinates.
///
/// Tile-index bits are recovered strictly from least to most significant, so
/// the value and the count of known low bits fully describe the state, and
/// `+1` neighbour tiles reduce to carry arithmetic on the known prefix.
struct Recovery {
    n: usize,
    k: usize,
    w: usize,
    row_value: u64,
    row_known: usize,
    col_value: u64,
    col_known: usize,
}

impl Recovery {
    /// Global bit position (within the low `k·n` unknown bits) of tile-matrix
    /// entry `(row, col)`.
    fn bit_pos(&self, row: usize, col: usize) -> usize {
        (self.n - 1 - row) * self.n + (self.n - 1 - col)
    }

    /// Entry `(row, col)` of the tile index at offset `(row_off, col_off)`
    /// from the anchor tile; `row` must be a fixed or already-recovered row.
    fn tile_entry(
        &self,
        fixed: &BitMatrix,
        row: usize,
        col: usize,
        row_off: bool,
        col_off: bool,
    ) -> Result<bool> {
        if row < self.n - self.k {
            return Ok(fixed.get(row, col));
        }
        let g = self.bit_pos(row, col);
        let b = g / 2;
        let (value, known, off) = if g % 2 == 1 {
            (self.row_value, self.row_known, row_off)
        } else {
            (self.col_value, self.col_known, col_off)
        };
        if b >= known {
            return Err(Error::TheoryViolation(format!(
                "tile entry ({row},{col}) read before recovery"
            )));
        }
        let v = if off { value.wrapping_add(1) } else { value };
        Ok((v >> b) & 1 == 1)
    }

    /// Records the raw recovered bit of the tile-index entry `(row, col)`;
    /// the raw bit belongs to the neighbour at `(row_off, col_off)` and is
    /// carried back to the anchor tile.
    fn absorb(&mut self, row: usize, col: usize, raw: bool, row_off: bool, col_off: bool) -> Result<()> {
        let g = self.bit_pos(row, col);
        let b = g / 2;
        let (value, known, off) = if g % 2 == 1 {
            (&mut self.row_value, &mut self.row_known, row_off)
        } else {
            (&mut self.col_value, &mut self.col_known, col_off)
        };
        if b != *known {
            return Err(Error::TheoryViolation(format!(
                "bit {b} recovered out of order (expected {})",
                *known
            )));
        }
        let bit = if off {
            // neighbour = value + 1: the carry into bit b is determined by
            // the already-known low bits
            let mask = (1u64 << b) - 1;
            let carry = *value & mask == mask;
            raw ^ carry
        } else {
            raw
        };
        if bit {
            *value |= 1 << b;
        }
        *known += 1;
        Ok(())
    }

    fn finish(self) -> Result<(u64, u64)> {
        if self.row_known != self.w || self.col_known != self.w {
            return Err(Error::TheoryViolation(format!(
                "recovery incomplete: {}/{} row bits, {}/{} column bits",
                self.row_known, self.w, self.col_known, self.w
            )));
        }
        Ok((self.row_value, self.col_value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pascal::{enumerate_profiles, RotationProfile};
    use crate::tiles;
    use crate::torus::{build_affine_array, AffineSpec, Modulo, WindowSpec};
    use crate::verify::find_occurrences;

    #[test]
    fn zero_pattern_of_pascal_array_sits_at_origin() {
        let spec = AffineSpec::pascal(1).unwrap();
        let got = locate_pattern(&spec, 2, (0, 0), &BitMatrix::zeros(2, 2), (0, 0)).unwrap();
        assert_eq!(got, (0, 0));
    }

    #[test]
    fn known_tile_position() {
        let spec = AffineSpec::pascal(1).unwrap();
        let pat = BitMatrix::from_rows(&[vec![0, 1], vec![0, 1]]);
        assert_eq!(locate_pattern(&spec, 2, (0, 0), &pat, (0, 0)).unwrap(), (0, 2));
    }

    #[test]
    fn input_validation() {
        let spec = AffineSpec::pascal(1).unwrap();
        let pat = BitMatrix::zeros(2, 2);
        assert!(locate_pattern(&spec, 3, (0, 0), &pat, (0, 0)).is_err());
        assert!(locate_pattern(&spec, 2, (0, 0), &pat, (2, 0)).is_err());
        assert!(locate_pattern(&spec, 2, (1, 0), &pat, (0, 0)).is_err());
        assert!(locate_pattern(&spec, 1, (0, 0), &pat, (0, 0)).is_err()); // 2x2 pattern at level 1
    }

    #[test]
    fn exhaustive_agreement_with_scanning_at_tile_side_2() {
        let n = 2usize;
        for profile in enumerate_profiles(n).unwrap() {
            for z_idx in [0u64, 5, 15] {
                let spec = AffineSpec::new(
                    1,
                    profile.clone(),
                    tiles::matrix_from_index(n, z_idx).unwrap(),
                )
                .unwrap();
                let array = build_affine_array(&spec).unwrap();
                for level in 1..=n {
                    let t = 1usize << (level * n / 2);
                    let part_side = n * t;
                    let per_axis = array.side() / part_side;
                    for p in 0..per_axis {
                        for q in 0..per_axis {
                            let part = array.aligned_subarray(part_side, (p, q)).unwrap();
                            for ci in 0..n {
                                for cj in 0..n {
                                    for tr in 0..t {
                                        for tc in 0..t {
                                            let pos = (tr * n + ci, tc * n + cj);
                                            let pat = part.window_at(pos, WindowSpec::new(level, n).unwrap());
                                            let got = locate_pattern(&spec, level, (p, q), &pat, (ci, cj)).unwrap();
                                            assert_eq!(got, pos, "profile {profile:?} z {z_idx} level {level}");
                                            let hits = find_occurrences(
                                                &part,
                                                &pat,
                                                Modulo::new(n, n).unwrap(),
                                                (ci, cj),
                                                usize::MAX,
                                            )
                                            .unwrap();
                                            assert_eq!(hits, vec![pos]);
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn every_recovery_configuration_agrees_with_scanning_at_tile_side_4() {
        // The row-recovery shape (phases, bands, anchored block) depends only
        // on the profile, the level and the class row; sweep all of them with
        // one query each, on a part with non-zero index where the level has
        // several parts.
        let n = 4usize;
        for (pi, profile) in enumerate_profiles(n).unwrap().into_iter().enumerate() {
            let z = tiles::matrix_from_index(n, (0x9E37 * (pi as u64 + 1)) & 0xFFFF).unwrap();
            let spec = AffineSpec::new(2, profile, z).unwrap();
            let array = build_affine_array(&spec).unwrap();
            for level in 1..=n {
                let t = 1usize << (level * n / 2);
                let part_side = n * t;
                let per_axis = array.side() / part_side;
                let part_idx = (per_axis - 1, per_axis / 2);
                let part = array.aligned_subarray(part_side, part_idx).unwrap();
                for ci in 0..n {
                    for cj in 0..n {
                        let pos = (
                            ((ci * 7 + cj * 3 + level) % t) * n + ci,
                            ((ci * 3 + cj * 5 + 1) % t) * n + cj,
                        );
                        let pat = part.window_at(pos, WindowSpec::new(level, n).unwrap());
                        let got =
                            locate_pattern(&spec, level, part_idx, &pat, (ci, cj)).unwrap();
                        assert_eq!(got, pos, "profile {pi} level {level} class ({ci},{cj})");
                        let hits = find_occurrences(
                            &part,
                            &pat,
                            Modulo::new(n, n).unwrap(),
                            (ci, cj),
                            usize::MAX,
                        )
                        .unwrap();
                        assert_eq!(hits, vec![pos]);
                    }
                }
            }
        }
    }

    #[test]
    fn decoded_positions_verify_by_scan_at_tile_side_4() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let n = 4usize;
        let profiles = enumerate_profiles(n).unwrap();
        let profile: RotationProfile = profiles[5].clone();
        let z = tiles::matrix_from_index(n, 0xBEEF & 0xFFFF).unwrap();
        let spec = AffineSpec::new(2, profile, z).unwrap();
        let array = build_affine_array(&spec).unwrap();
        for _ in 0..60 {
            let level = rng.random_range(1..=n);
            let t = 1usize << (level * n / 2);
            let part_side = n * t;
            let per_axis = array.side() / part_side;
            let (p, q) = (rng.random_range(0..per_axis), rng.random_range(0..per_axis));
            let part = array.aligned_subarray(part_side, (p, q)).unwrap();
            let class = (rng.random_range(0..n), rng.random_range(0..n));
            let pos = (
                rng.random_range(0..t) * n + class.0,
                rng.random_range(0..t) * n + class.1,
            );
            let pat = part.window_at(pos, WindowSpec::new(level, n).unwrap());
            let got = locate_pattern(&spec, level, (p, q), &pat, class).unwrap();
            assert_eq!(got, pos);
        }
    }
}
