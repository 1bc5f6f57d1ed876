//! Property tests: algebra laws, agreement with naive entry-by-entry
//! reference implementations, and serialization round trips.

use proptest::prelude::*;

use torus_core::gf2::{BitMatrix, BitVec};
use torus_core::io::{read_array, write_array, ArrayFormat};
use torus_core::tiles;
use torus_core::torus::{Modulo, ToroidalArray, WindowSpec};
use torus_core::verify::{self, CensusMode, NestedReport, PerfectnessReport};

/// Naive reference: plain nested-loop product over Vec<Vec<bool>>.
fn naive_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let rows = a.len();
    let mid = b.len();
    let cols = b[0].len();
    let mut out = vec![vec![false; cols]; rows];
    for (i, out_row) in out.iter_mut().enumerate() {
        for (j, cell) in out_row.iter_mut().enumerate() {
            for (x, b_row) in b.iter().enumerate().take(mid) {
                *cell ^= a[i][x] & b_row[j];
            }
        }
    }
    out
}

fn naive_rank(rows: &[Vec<bool>]) -> usize {
    let mut rows: Vec<Vec<bool>> = rows.to_vec();
    let height = rows.len();
    let width = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..width {
        if let Some(pivot) = (rank..height).find(|&r| rows[r][col]) {
            rows.swap(pivot, rank);
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row[col] {
                    for (cell, &p) in row.iter_mut().zip(&pivot_row) {
                        *cell ^= p;
                    }
                }
            }
            rank += 1;
        }
    }
    rank
}

fn to_nested(m: &BitMatrix) -> Vec<Vec<bool>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect())
        .collect()
}

fn from_nested(rows: &[Vec<bool>]) -> BitMatrix {
    BitMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
}

fn arb_matrix(max_dim: usize) -> impl Strategy<Value = BitMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(r, c)| {
        proptest::collection::vec(proptest::collection::vec(any::<bool>(), c), r)
            .prop_map(|rows| from_nested(&rows))
    })
}

/// Conformable factor pair with random inner dimension.
fn arb_mul_pair(max_dim: usize) -> impl Strategy<Value = (BitMatrix, BitMatrix)> {
    (1..=max_dim, 1..=max_dim, 1..=max_dim).prop_flat_map(|(r, mid, c)| {
        (
            proptest::collection::vec(proptest::collection::vec(any::<bool>(), mid), r),
            proptest::collection::vec(proptest::collection::vec(any::<bool>(), c), mid),
        )
            .prop_map(|(a, b)| (from_nested(&a), from_nested(&b)))
    })
}

fn arb_square(max_dim: usize) -> impl Strategy<Value = BitMatrix> {
    (1..=max_dim).prop_flat_map(|n| {
        proptest::collection::vec(proptest::collection::vec(any::<bool>(), n), n)
            .prop_map(|rows| from_nested(&rows))
    })
}

fn arb_array(max_side: usize) -> impl Strategy<Value = ToroidalArray> {
    (1..=max_side).prop_flat_map(|n| {
        proptest::collection::vec(proptest::collection::vec(0u8..2, n), n)
            .prop_map(|rows| ToroidalArray::from_rows(&rows).unwrap())
    })
}

proptest! {
    #[test]
    fn product_matches_naive_reference((a, b) in arb_mul_pair(9)) {
        let packed = a.mul(&b).unwrap();
        let naive = naive_mul(&to_nested(&a), &to_nested(&b));
        prop_assert_eq!(packed, from_nested(&naive));
    }

    #[test]
    fn rank_matches_naive_reference(a in arb_matrix(10)) {
        prop_assert_eq!(a.rank(), naive_rank(&to_nested(&a)));
    }

    #[test]
    fn product_is_associative(
        a in arb_square(6),
        b in arb_square(6),
        c in arb_square(6),
    ) {
        let n = a.rows().min(b.rows()).min(c.rows());
        let fit = |m: &BitMatrix| m.submatrix(0, 0, n, n).unwrap();
        let (a, b, c) = (fit(&a), fit(&b), fit(&c));
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn xor_commutes_and_product_distributes(
        a in arb_square(6),
        b in arb_square(6),
        c in arb_square(6),
    ) {
        let n = a.rows().min(b.rows()).min(c.rows());
        let fit = |m: &BitMatrix| m.submatrix(0, 0, n, n).unwrap();
        let (a, b, c) = (fit(&a), fit(&b), fit(&c));
        prop_assert_eq!(a.xor(&b).unwrap(), b.xor(&a).unwrap());
        let left = a.mul(&b.xor(&c).unwrap()).unwrap();
        let right = a.mul(&b).unwrap().xor(&a.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn inverse_is_two_sided_and_exists_iff_full_rank(a in arb_square(8)) {
        let n = a.rows();
        match a.inverse() {
            Some(inv) => {
                prop_assert_eq!(a.rank(), n);
                prop_assert_eq!(a.mul(&inv).unwrap(), BitMatrix::identity(n));
                prop_assert_eq!(inv.mul(&a).unwrap(), BitMatrix::identity(n));
            }
            None => prop_assert!(a.rank() < n),
        }
    }

    #[test]
    fn rotation_composes(bits in proptest::collection::vec(any::<bool>(), 1..24), m in 0usize..40) {
        let v = {
            let mut v = BitVec::zeros(bits.len());
            for (i, &b) in bits.iter().enumerate() { v.set(i, b); }
            v
        };
        let direct = v.rotate(m);
        let stepped = (0..m).fold(v.clone(), |acc, _| acc.rotate(1));
        prop_assert_eq!(direct, stepped);
        prop_assert_eq!(v.rotate(v.len()), v);
    }

    #[test]
    fn tile_index_round_trip(k in 0u64..65536) {
        let m = tiles::matrix_from_index(4, k).unwrap();
        prop_assert_eq!(tiles::index_from_matrix(&m).unwrap(), k);
    }

    #[test]
    fn interleave_round_trip(l in 0u64..(1 << 20), m in 0u64..(1 << 20)) {
        let k = tiles::join(l, m);
        prop_assert_eq!(tiles::odd_bits(k), l);
        prop_assert_eq!(tiles::even_bits(k), m);
    }

    #[test]
    fn array_files_round_trip(a in arb_array(20)) {
        for fmt in [ArrayFormat::TextGrid, ArrayFormat::PbmP1] {
            let text = write_array(&a, fmt);
            prop_assert_eq!(read_array(&text).unwrap(), a.clone());
        }
    }

    #[test]
    fn windows_wrap_periodically(a in arb_array(12), r in 0usize..24, c in 0usize..24) {
        let w = WindowSpec::new(2, 3).unwrap();
        let base = a.window_at((r, c), w);
        prop_assert_eq!(a.window_at((r + a.side(), c), w), base.clone());
        prop_assert_eq!(a.window_at((r, c + a.side()), w), base);
    }
}

#[test]
fn perfectness_report_round_trips_as_json() {
    let a = torus_core::samples::small_perfect();
    let report: PerfectnessReport =
        verify::is_perfect(&a, WindowSpec::new(2, 2).unwrap(), Modulo::new(1, 1).unwrap()).unwrap();
    let json = serde_json::to_string(&report).unwrap();
    assert_eq!(serde_json::from_str::<PerfectnessReport>(&json).unwrap(), report);

    // a failing report keeps its witness through the round trip
    let report =
        verify::is_perfect(&a, WindowSpec::new(2, 2).unwrap(), Modulo::new(2, 2).unwrap()).unwrap();
    assert!(!report.perfect);
    let json = serde_json::to_string(&report).unwrap();
    assert_eq!(serde_json::from_str::<PerfectnessReport>(&json).unwrap(), report);
}

#[test]
fn nested_and_census_reports_round_trip_as_json() {
    let nested: NestedReport =
        verify::is_nested_perfect(&torus_core::samples::fourfold_perfect(), 2).unwrap();
    let json = serde_json::to_string(&nested).unwrap();
    assert_eq!(serde_json::from_str::<NestedReport>(&json).unwrap(), nested);

    let census = verify::census_affine(2, CensusMode::Sample { count: 3, seed: 5 }).unwrap();
    let json = serde_json::to_string(&census).unwrap();
    assert_eq!(serde_json::from_str(&json).map(|c: verify::CensusReport| c).unwrap(), census);
}
