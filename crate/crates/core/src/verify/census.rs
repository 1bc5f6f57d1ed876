//! Census of the affine family: distinctness and nestedness over all
//! (profile, offset) pairs, exhaustively for 2×2 tiles and by seeded
//! sampling for 4×4.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pascal::{enumerate_profiles, RotationProfile};
use crate::tiles::matrix_from_index;
use crate::torus::{build_affine_array, AffineSpec, ToroidalArray};
use crate::verify::{is_nested_perfect_sequential, nested_side};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum CensusMode {
    Exhaustive,
    Sample { count: usize, seed: u64 },
}

/// Counts from generating and verifying family members.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CensusReport {
    pub n: usize,
    #[serde(flatten)]
    pub mode: CensusMode,
    /// `n² + n - 1`, the binary logarithm of the family size.
    pub family_size_log2: u32,
    pub family_size: u64,
    pub generated: usize,
    pub distinct: usize,
    pub nested_passing: usize,
}

impl CensusReport {
    /// True when every generated array was pairwise distinct and nested.
    pub fn all_good(&self) -> bool {
        self.distinct == self.generated && self.nested_passing == self.generated
    }
}

/// Binary logarithm of the family size for `n × n` tiles.
pub fn family_size_log2(n: usize) -> u32 {
    (n * n + n - 1) as u32
}

/// The family size `2^{n²+n-1}`; representable up to n = 8 (2^71).
pub fn family_size(n: usize) -> Result<u128> {
    let log2 = family_size_log2(n);
    if log2 >= 128 {
        return Err(Error::SizeCap(format!("family size 2^{log2} exceeds 128 bits")));
    }
    Ok(1u128 << log2)
}

/// Generates family members, checks pairwise distinctness (content digest
/// with full comparison on collision) and nested perfectness of each.
pub fn census_affine(n: usize, mode: CensusMode) -> Result<CensusReport> {
    if !n.is_power_of_two() || n < 2 {
        return Err(Error::InvalidArgument(format!(
            "census needs n a power of two with n >= 2, got {n}"
        )));
    }
    let d = n.trailing_zeros();
    let specs: Vec<AffineSpec> = match mode {
        CensusMode::Exhaustive => {
            if n > 2 {
                let side = nested_side(n)? as u128;
                let members = family_size(n)?;
                let bytes = members.saturating_mul(side * side / 8);
                return Err(Error::SizeCap(format!(
                    "exhaustive census at n = {n} means {members} arrays of side {side} (about {bytes} bytes); use sampling"
                )));
            }
            let mut specs = Vec::new();
            for profile in enumerate_profiles(n)? {
                for z in 0..1u64 << (n * n) {
                    specs.push(AffineSpec::new(d, profile.clone(), matrix_from_index(n, z)?)?);
                }
            }
            specs
        }
        CensusMode::Sample { count, seed } => {
            if n > 4 {
                return Err(Error::SizeCap(format!(
                    "cannot sample at n = {n}: a single family member has side {}, too large to materialize",
                    nested_side(n)?
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| {
                    let diff = rng.random_range(0..1u64 << (n - 1));
                    let z = rng.random_range(0..1u64 << (n * n));
                    let profile = RotationProfile::from_difference_bits(n, diff)?;
                    AffineSpec::new(d, profile, matrix_from_index(n, z)?)
                })
                .collect::<Result<_>>()?
        }
    };

    let verify_one = |spec: &AffineSpec| -> Result<(ToroidalArray, bool)> {
        let array = build_affine_array(spec)?;
        let nested = is_nested_perfect_sequential(&array, n)?.nested;
        Ok((array, nested))
    };
    #[cfg(feature = "parallel")]
    let checked: Vec<(ToroidalArray, bool)> = specs.par_iter().map(verify_one).collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let checked: Vec<(ToroidalArray, bool)> = specs.iter().map(verify_one).collect::<Result<_>>()?;

    let nested_passing = checked.iter().filter(|(_, nested)| *nested).count();

    // digest-first distinctness; equal digests are confirmed on full content
    let mut by_digest: std::collections::HashMap<u128, Vec<usize>> = std::collections::HashMap::new();
    let mut distinct = 0usize;
    for (idx, (array, _)) in checked.iter().enumerate() {
        let bucket = by_digest.entry(array.digest()).or_default();
        if !bucket.iter().any(|&other| checked[other].0 == *array) {
            distinct += 1;
        }
        bucket.push(idx);
    }

    Ok(CensusReport {
        n,
        mode,
        family_size_log2: family_size_log2(n),
        family_size: family_size(n)?.try_into().unwrap_or(u64::MAX),
        generated: checked.len(),
        distinct,
        nested_passing,
    })
}
