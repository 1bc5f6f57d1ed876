//! Small reference arrays used by tests and documentation.

use crate::torus::ToroidalArray;

/// 4×4 array in which every 2×2 pattern occurs exactly once (modulo (1,1)),
/// but whose upper-left 2×2 aligned part repeats the 1×2 pattern `01` and
/// misses `00` — perfect yet not nested.
pub const SMALL_PERFECT: &str = "\
0100
0111
1110
0010";

/// 8×8 array in which every 2×2 pattern occurs once per residue class modulo
/// (2,2), but whose upper-left 4×4 aligned part is unbalanced — perfect for
/// the (2,2,2,2) query yet not nested.
pub const FOURFOLD_PERFECT: &str = "\
00000000
00011011
01010101
00011011
10101010
00011011
11111111
00011011";

/// The 8×8 nested perfect array produced by the Pascal construction with
/// 2×2 tiles (zero rotation profile, zero offset).
pub const NESTED_PERFECT: &str = "\
00010100
00010001
10111110
10111011
10111110
00010001
00010100
10111011";

fn parse(grid: &str) -> ToroidalArray {
    let rows: Vec<Vec<u8>> = grid
        .lines()
        .map(|l| l.bytes().map(|b| b - b'0').collect())
        .collect();
    ToroidalArray::from_rows(&rows).expect("reference grid is square")
}

pub fn small_perfect() -> ToroidalArray {
    parse(SMALL_PERFECT)
}

pub fn fourfold_perfect() -> ToroidalArray {
    parse(FOURFOLD_PERFECT)
}

pub fn nested_perfect() -> ToroidalArray {
    parse(NESTED_PERFECT)
}
