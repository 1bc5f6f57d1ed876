//! Exhaustive perfectness and nestedness verification.
//!
//! The hot path packs each window into an integer key (row-major, least
//! significant bit at the window's upper-left corner) and slides it one
//! column at a time with shift/mask updates, so checking a level touches
//! every position once with `window_rows` fresh bit reads per step. Tallies
//! are flat arrays indexed by `class · 2^{area} + key`; a query is perfect
//! exactly when every tally is 1.
//!
//! With the `parallel` feature the position space splits into disjoint row
//! bands with private tallies merged at the end, and nested checks fan out
//! over aligned parts. The sequential entry points always exist and produce
//! identical reports.

mod census;
mod decode;

pub use census::{census_affine, family_size, family_size_log2, CensusMode, CensusReport};
pub use decode::locate_pattern;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::torus::{Modulo, ToroidalArray, WindowSpec};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Largest tally table the verifier will allocate (bytes per band).
const MAX_TALLY_BYTES: u128 = 256 << 20;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Exec {
    Sequential,
    #[cfg_attr(not(feature = "parallel"), allow(dead_code))]
    Parallel,
}

impl Exec {
    fn auto() -> Exec {
        #[cfg(feature = "parallel")]
        {
            Exec::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            Exec::Sequential
        }
    }
}

/// Why a perfectness query failed, with the offending pattern when there is
/// one. Patterns are rendered as row strings of `0`/`1`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// The same pattern occurs at two or more positions of one residue class.
    Duplicate {
        pattern: Vec<String>,
        class: (usize, usize),
        positions: Vec<(usize, usize)>,
    },
    /// A pattern never occurs in some residue class.
    Missing {
        pattern: Vec<String>,
        class: (usize, usize),
    },
    /// Positions per class cannot biject with patterns, so no scan is needed.
    CountMismatch {
        positions_per_class: u64,
        patterns_log2: u32,
    },
}

/// Outcome of one perfectness query.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PerfectnessReport {
    pub perfect: bool,
    pub window: WindowSpec,
    pub modulo: Modulo,
    pub witness: Option<Witness>,
    pub positions_scanned: u64,
}

/// Outcome of a nestedness query: one entry per window height, smallest
/// aligned parts first.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct NestedReport {
    pub nested: bool,
    pub window: WindowSpec,
    pub modulo: Modulo,
    pub levels: Vec<NestedLevel>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct NestedLevel {
    pub window: WindowSpec,
    pub part_side: usize,
    pub part_count: usize,
    /// Reports for the parts that failed; empty when the level passes.
    pub failures: Vec<NestedFailure>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct NestedFailure {
    pub part_anchor: (usize, usize),
    pub report: PerfectnessReport,
}

/// Positions congruent to `class` where `pattern` occurs, up to `limit`.
pub fn find_occurrences(
    a: &ToroidalArray,
    pattern: &BitMatrix,
    modulo: Modulo,
    class: (usize, usize),
    limit: usize,
) -> Result<Vec<(usize, usize)>> {
    if class.0 >= modulo.rows || class.1 >= modulo.cols {
        return Err(Error::InvalidArgument(format!(
            "class {:?} not below modulo {modulo}",
            class
        )));
    }
    if pattern.rows() > a.side() || pattern.cols() > a.side() {
        return Err(Error::DimensionMismatch(format!(
            "pattern {}x{} larger than array side {}",
            pattern.rows(),
            pattern.cols(),
            a.side()
        )));
    }
    let mut hits = Vec::new();
    let mut r = class.0;
    while r < a.side() {
        let mut c = class.1;
        while c < a.side() {
            if window_equals(a, (r, c), pattern) {
                hits.push((r, c));
                if hits.len() >= limit {
                    return Ok(hits);
                }
            }
            c += modulo.cols;
        }
        r += modulo.rows;
    }
    Ok(hits)
}

/// Number of positions in the residue class where the pattern occurs.
pub fn count_occurrences(
    a: &ToroidalArray,
    pattern: &BitMatrix,
    modulo: Modulo,
    class: (usize, usize),
) -> Result<u64> {
    Ok(find_occurrences(a, pattern, modulo, class, usize::MAX)?.len() as u64)
}

fn window_equals(a: &ToroidalArray, pos: (usize, usize), pattern: &BitMatrix) -> bool {
    for i in 0..pattern.rows() {
        let r = (pos.0 + i) % a.side();
        for j in 0..pattern.cols() {
            if a.get(r, pos.1 + j) != pattern.get(i, j) {
                return false;
            }
        }
    }
    true
}

/// Checks that every `window` pattern occurs exactly once in each residue
/// class modulo `modulo`. Both moduli must divide the array side.
pub fn is_perfect(a: &ToroidalArray, window: WindowSpec, modulo: Modulo) -> Result<PerfectnessReport> {
    is_perfect_with(a, window, modulo, Exec::auto())
}

/// [`is_perfect`] on the calling thread only; the fallback path used when the
/// `parallel` feature is disabled, kept public for comparison runs.
pub fn is_perfect_sequential(a: &ToroidalArray, window: WindowSpec, modulo: Modulo) -> Result<PerfectnessReport> {
    is_perfect_with(a, window, modulo, Exec::Sequential)
}

fn is_perfect_with(a: &ToroidalArray, window: WindowSpec, modulo: Modulo, exec: Exec) -> Result<PerfectnessReport> {
    let side = a.side();
    if side == 0 {
        return Err(Error::InvalidArgument("empty array".into()));
    }
    if side % modulo.rows != 0 || side % modulo.cols != 0 {
        return Err(Error::InvalidArgument(format!(
            "modulo {modulo} does not divide array side {side}: residue classes would be uneven"
        )));
    }
    let per_class = (side / modulo.rows) as u64 * (side / modulo.cols) as u64;
    let area = window.area();
    let patterns = if area < 128 { 1u128 << area } else { u128::MAX };
    if u128::from(per_class) != patterns {
        return Ok(PerfectnessReport {
            perfect: false,
            window,
            modulo,
            witness: Some(Witness::CountMismatch {
                positions_per_class: per_class,
                patterns_log2: area as u32,
            }),
            positions_scanned: 0,
        });
    }
    let keys = 1usize << area;
    let table_bytes = (modulo.classes() as u128) * (keys as u128) * 4;
    if table_bytes > MAX_TALLY_BYTES {
        return Err(Error::SizeCap(format!(
            "tally table for window {window} modulo {modulo} would need {table_bytes} bytes"
        )));
    }

    let tallies = match exec {
        Exec::Sequential => scan_band(a, window, modulo, 0, side),
        Exec::Parallel => scan_parallel(a, window, modulo),
    };

    let witness = first_defect(a, window, modulo, &tallies, keys)?;
    Ok(PerfectnessReport {
        perfect: witness.is_none(),
        window,
        modulo,
        witness,
        positions_scanned: (side as u64) * (side as u64),
    })
}

#[cfg(feature = "parallel")]
fn scan_parallel(a: &ToroidalArray, window: WindowSpec, modulo: Modulo) -> Vec<u32> {
    let side = a.side();
    let threads = rayon::current_num_threads().max(1);
    if side < 64 || threads == 1 {
        return scan_band(a, window, modulo, 0, side);
    }
    let band = side.div_ceil(threads);
    let starts: Vec<usize> = (0..side).step_by(band).collect();
    starts
        .into_par_iter()
        .map(|start| scan_band(a, window, modulo, start, (start + band).min(side)))
        .reduce_with(|mut acc, t| {
            for (x, y) in acc.iter_mut().zip(t) {
                *x += y;
            }
            acc
        })
        .unwrap_or_default()
}

#[cfg(not(feature = "parallel"))]
fn scan_parallel(a: &ToroidalArray, window: WindowSpec, modulo: Modulo) -> Vec<u32> {
    scan_band(a, window, modulo, 0, a.side())
}

/// Tallies every window key for anchor rows in `row_start..row_end`.
fn scan_band(a: &ToroidalArray, w: WindowSpec, m: Modulo, row_start: usize, row_end: usize) -> Vec<u32> {
    let side = a.side();
    let keys = 1usize << w.area();
    let mut tallies = vec![0u32; m.classes() * keys];
    // mask keeping, per window row, all key bits except the rightmost column
    let keep: u64 = if w.cols == 1 {
        0
    } else {
        let row_keep = (1u64 << (w.cols - 1)) - 1;
        (0..w.rows).fold(0, |acc, i| acc | row_keep << (i * w.cols))
    };
    let mut row_idx = vec![0usize; w.rows];
    for r in row_start..row_end {
        for (i, ri) in row_idx.iter_mut().enumerate() {
            *ri = (r + i) % side;
        }
        let mut key: u64 = 0;
        for (i, &ri) in row_idx.iter().enumerate() {
            for v in 0..w.cols {
                if a.bit(ri, v % side) {
                    key |= 1 << (i * w.cols + v);
                }
            }
        }
        let class_base = (r % m.rows) * m.cols;
        let mut cq = 0usize;
        for c in 0..side {
            if c > 0 {
                let mut incol = c + w.cols - 1;
                while incol >= side {
                    incol -= side;
                }
                key = (key >> 1) & keep;
                let top = w.cols - 1;
                for (i, &ri) in row_idx.iter().enumerate() {
                    if a.bit(ri, incol) {
                        key |= 1 << (i * w.cols + top);
                    }
                }
                cq += 1;
                if cq == m.cols {
                    cq = 0;
                }
            }
            tallies[(class_base + cq) * keys + key as usize] += 1;
        }
    }
    tallies
}

/// First class/key whose tally is not exactly 1, as a witness.
fn first_defect(
    a: &ToroidalArray,
    window: WindowSpec,
    modulo: Modulo,
    tallies: &[u32],
    keys: usize,
) -> Result<Option<Witness>> {
    for class_idx in 0..modulo.classes() {
        let class = (class_idx / modulo.cols, class_idx % modulo.cols);
        for key in 0..keys {
            let t = tallies[class_idx * keys + key];
            if t == 1 {
                continue;
            }
            let pattern = pattern_from_key(window, key as u64);
            let witness = if t == 0 {
                Witness::Missing {
                    pattern: pattern.to_row_strings(),
                    class,
                }
            } else {
                let positions = find_occurrences(a, &pattern, modulo, class, 8)?;
                Witness::Duplicate {
                    pattern: pattern.to_row_strings(),
                    class,
                    positions,
                }
            };
            return Ok(Some(witness));
        }
    }
    Ok(None)
}

/// Inverse of the scan's key packing.
fn pattern_from_key(w: WindowSpec, key: u64) -> BitMatrix {
    BitMatrix::from_fn(w.rows, w.cols, |i, j| (key >> (i * w.cols + j)) & 1 == 1)
}

/// Nestedness in the general form: for each `k = 0..window.rows-1`, every
/// aligned part of the `2^{k·cols/2}`-fold subdivision must be perfect for
/// the window with `rows - k` rows and the same modulo. Levels are reported
/// smallest parts first.
pub fn is_nested(a: &ToroidalArray, window: WindowSpec, modulo: Modulo) -> Result<NestedReport> {
    is_nested_with(a, window, modulo, Exec::auto())
}

/// [`is_nested`] without the part-level fan-out.
pub fn is_nested_sequential(a: &ToroidalArray, window: WindowSpec, modulo: Modulo) -> Result<NestedReport> {
    is_nested_with(a, window, modulo, Exec::Sequential)
}

fn is_nested_with(a: &ToroidalArray, window: WindowSpec, modulo: Modulo, exec: Exec) -> Result<NestedReport> {
    let side = a.side();
    let mut levels = Vec::with_capacity(window.rows);
    for height in 1..=window.rows {
        let k = window.rows - height;
        let exponent = k * window.cols;
        if exponent % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "subdivision factor 2^({k}·{}/2) is not integral",
                window.cols
            )));
        }
        let factor = 1usize
            .checked_shl((exponent / 2) as u32)
            .filter(|f| *f <= side && side % *f == 0)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "subdivision factor 2^{} does not divide array side {side}",
                    exponent / 2
                ))
            })?;
        let part_side = side / factor;
        let level_window = WindowSpec::new(height, window.cols)?;
        let parts = a.aligned_subarrays(part_side)?;
        let part_count = parts.len();
        let failures = check_parts(parts, level_window, modulo, exec)?;
        levels.push(NestedLevel {
            window: level_window,
            part_side,
            part_count,
            failures,
        });
    }
    Ok(NestedReport {
        nested: levels.iter().all(|l| l.failures.is_empty()),
        window,
        modulo,
        levels,
    })
}

fn check_parts(
    parts: Vec<((usize, usize), ToroidalArray)>,
    window: WindowSpec,
    modulo: Modulo,
    exec: Exec,
) -> Result<Vec<NestedFailure>> {
    let check = |(anchor, part): &((usize, usize), ToroidalArray)| -> Result<Option<NestedFailure>> {
        // big single parts still use band parallelism; small parts scan inline
        let report = match exec {
            Exec::Sequential => is_perfect_sequential(part, window, modulo)?,
            Exec::Parallel => is_perfect(part, window, modulo)?,
        };
        Ok((!report.perfect).then_some(NestedFailure {
            part_anchor: *anchor,
            report,
        }))
    };
    let collected: Result<Vec<Option<NestedFailure>>> = match exec {
        Exec::Sequential => parts.iter().map(check).collect(),
        #[cfg(feature = "parallel")]
        Exec::Parallel => parts.par_iter().map(check).collect(),
        #[cfg(not(feature = "parallel"))]
        Exec::Parallel => parts.iter().map(check).collect(),
    };
    Ok(collected?.into_iter().flatten().collect())
}

/// Side of the square array a nested query for `n × n` tiles expects:
/// `n · 2^{n²/2}`.
pub fn nested_side(n: usize) -> Result<usize> {
    if !n.is_power_of_two() || n < 2 {
        return Err(Error::InvalidArgument(format!(
            "nested queries need n a power of two with n >= 2, got {n}"
        )));
    }
    (n * n / 2)
        .try_into()
        .ok()
        .and_then(|shift: u32| 1usize.checked_shl(shift))
        .and_then(|f| f.checked_mul(n))
        .ok_or_else(|| Error::SizeCap(format!("side n·2^{} overflows", n * n / 2)))
}

/// Square nestedness: the array must have side `n · 2^{n²/2}`, and for each
/// `k = 1..=n` every aligned part of side `n · 2^{nk/2}` must be perfect for
/// the `k × n` window modulo `(n, n)`.
pub fn is_nested_perfect(a: &ToroidalArray, n: usize) -> Result<NestedReport> {
    is_nested_perfect_with(a, n, Exec::auto())
}

/// [`is_nested_perfect`] on the calling thread only.
pub fn is_nested_perfect_sequential(a: &ToroidalArray, n: usize) -> Result<NestedReport> {
    is_nested_perfect_with(a, n, Exec::Sequential)
}

fn is_nested_perfect_with(a: &ToroidalArray, n: usize, exec: Exec) -> Result<NestedReport> {
    let expected = nested_side(n)?;
    if a.side() != expected {
        return Err(Error::DimensionMismatch(format!(
            "array side {} does not match n·2^(n²/2) = {expected} for n = {n}",
            a.side()
        )));
    }
    is_nested_with(a, WindowSpec::new(n, n)?, Modulo::new(n, n)?, exec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;
    use crate::torus::build_pascal_array;

    fn w(r: usize, c: usize) -> WindowSpec {
        WindowSpec::new(r, c).unwrap()
    }

    fn m(r: usize, c: usize) -> Modulo {
        Modulo::new(r, c).unwrap()
    }

    #[test]
    fn count_occurrences_small_cases() {
        let a = samples::small_perfect();
        let pat = BitMatrix::from_rows(&[vec![0, 1], vec![0, 1]]);
        assert_eq!(count_occurrences(&a, &pat, m(1, 1), (0, 0)).unwrap(), 1);

        let b = samples::fourfold_perfect();
        assert_eq!(count_occurrences(&b, &BitMatrix::zeros(2, 2), m(2, 2), (0, 0)).unwrap(), 1);

        // every array occurs in itself at the origin
        let whole = a.window_at((0, 0), w(4, 4));
        assert!(count_occurrences(&a, &whole, m(1, 1), (0, 0)).unwrap() >= 1);
    }

    #[test]
    fn count_occurrences_validation() {
        let a = samples::small_perfect();
        let pat = BitMatrix::zeros(5, 2);
        assert!(count_occurrences(&a, &pat, m(1, 1), (0, 0)).is_err());
        assert!(count_occurrences(&a, &BitMatrix::zeros(2, 2), m(2, 2), (2, 0)).is_err());
    }

    #[test]
    fn perfect_verdicts_on_reference_arrays() {
        let report = is_perfect(&samples::small_perfect(), w(2, 2), m(1, 1)).unwrap();
        assert!(report.perfect, "{report:?}");
        assert_eq!(report.positions_scanned, 16);

        assert!(is_perfect(&samples::fourfold_perfect(), w(2, 2), m(2, 2)).unwrap().perfect);
        assert!(is_perfect(&samples::nested_perfect(), w(2, 2), m(2, 2)).unwrap().perfect);
    }

    #[test]
    fn count_mismatch_short_circuits() {
        // 64 positions in the single class cannot biject with 16 patterns
        let a = samples::nested_perfect();
        let report = is_perfect(&a, w(2, 2), m(1, 1)).unwrap();
        assert!(!report.perfect);
        assert_eq!(report.positions_scanned, 0);
        assert_eq!(
            report.witness,
            Some(Witness::CountMismatch {
                positions_per_class: 64,
                patterns_log2: 4
            })
        );
    }

    #[test]
    fn modulo_must_divide_side() {
        let a = samples::nested_perfect();
        assert!(is_perfect(&a, w(2, 2), m(3, 2)).is_err());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let a = build_pascal_array(1).unwrap();
        for (win, md) in [(w(2, 2), m(2, 2)), (w(1, 2), m(2, 2))] {
            assert_eq!(
                is_perfect(&a, win, md).unwrap(),
                is_perfect_sequential(&a, win, md).unwrap()
            );
        }
    }

    #[test]
    fn duplicate_witness_lists_positions() {
        // all-zero array: the zero window occurs everywhere
        let a = ToroidalArray::from_rows(&[vec![0; 4], vec![0; 4], vec![0; 4], vec![0; 4]]).unwrap();
        let report = is_perfect(&a, w(2, 2), m(1, 1)).unwrap();
        assert!(!report.perfect);
        match report.witness.unwrap() {
            Witness::Duplicate { pattern, class, positions } => {
                assert_eq!(pattern, vec!["00", "00"]);
                assert_eq!(class, (0, 0));
                assert!(positions.len() >= 2);
            }
            other => panic!("expected duplicate, got {other:?}"),
        }
    }

    #[test]
    fn nested_verdicts_on_reference_arrays() {
        // the nested construction passes
        let report = is_nested_perfect(&samples::nested_perfect(), 2).unwrap();
        assert!(report.nested, "{report:?}");
        assert_eq!(report.levels.len(), 2);
        assert_eq!(report.levels[0].part_side, 4);
        assert_eq!(report.levels[0].part_count, 4);
        assert_eq!(report.levels[1].part_side, 8);

        // the fourfold-perfect sample fails in a 4x4 aligned part
        let report = is_nested_perfect(&samples::fourfold_perfect(), 2).unwrap();
        assert!(!report.nested);
        let level = &report.levels[0];
        assert_eq!(level.part_side, 4);
        assert!(!level.failures.is_empty());

        // the 4x4 sample fails the general nested query with a 1x2 witness
        let report = is_nested(&samples::small_perfect(), w(2, 2), m(1, 1)).unwrap();
        assert!(!report.nested);
        let failure = &report.levels[0].failures[0];
        assert_eq!(failure.part_anchor, (0, 0));
        match failure.report.witness.as_ref().unwrap() {
            Witness::Missing { pattern, .. } => assert_eq!(pattern, &vec!["00".to_string()]),
            other => panic!("expected missing 1x2 pattern, got {other:?}"),
        }
    }

    #[test]
    fn nested_side_check() {
        assert_eq!(nested_side(2).unwrap(), 8);
        assert_eq!(nested_side(4).unwrap(), 1024);
        assert!(nested_side(3).is_err());
        let err = is_nested_perfect(&samples::small_perfect(), 2).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }

    #[test]
    fn equidistribution_of_smaller_windows() {
        // every sub-window of the perfect window size stays equidistributed:
        // each s'×t' pattern occurs exactly 2^{st - s't'} times per class
        let a = build_pascal_array(1).unwrap();
        let md = m(2, 2);
        for (s2, t2) in [(1usize, 1usize), (1, 2), (2, 1), (2, 2)] {
            let keys = 1u64 << (s2 * t2);
            let expected = (1u64 << 4) / keys;
            for key in 0..keys {
                let pat = pattern_from_key(w(s2, t2), key);
                for class in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    assert_eq!(
                        count_occurrences(&a, &pat, md, class).unwrap(),
                        expected,
                        "window {s2}x{t2} key {key} class {class:?}"
                    );
                }
            }
        }

        // spot-check on the side-1024 array: one sample pattern per shape
        let big = crate::torus::build_pascal_array(2).unwrap();
        let md = m(4, 4);
        for (s2, t2, key) in [(1usize, 4usize, 0b1011u64), (2, 3, 0b010110), (3, 1, 0b101)] {
            let pat = pattern_from_key(w(s2, t2), key);
            let expected = (1u64 << 16) / (1u64 << (s2 * t2));
            for class in [(0, 0), (3, 1), (2, 2)] {
                assert_eq!(
                    count_occurrences(&big, &pat, md, class).unwrap(),
                    expected,
                    "window {s2}x{t2} class {class:?}"
                );
            }
        }
    }
}
