//! Paired permutation test for a difference in curve area.
//!
//! Two batches share observations and predictions and differ only in their
//! bands. Under the null hypothesis the two band assignments of each sample
//! are exchangeable, so a permutation swaps them independently per index.
//! Permutation `j` draws its swap mask from its own ChaCha stream `j` under
//! the user seed, which makes the result independent of scheduling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curve::{area_under, build_curve, CoordinateSystem, Rule, Window};
use crate::error::{Result, UccError};
use crate::exec::{map_indices, Execution};
use crate::metrics::{Batch, Sample};

/// Largest batch for which all `2^N` swap masks may be enumerated.
pub const MAX_EXACT_N: usize = 20;

const PAIRING_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Alternative {
    /// `|T| >= |T_obs|`.
    #[default]
    TwoSided,
    /// `T <= T_obs`: model A has the smaller area.
    Less,
    /// `T >= T_obs`.
    Greater,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CompareOptions {
    pub coords: CoordinateSystem,
    pub window: Option<Window>,
    pub rule: Rule,
    pub alternative: Alternative,
    /// Enumerate every swap mask instead of sampling. Requires
    /// `N <= MAX_EXACT_N`; `n_perm` is then ignored.
    pub exact: bool,
    pub execution: Execution,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    /// `AUUCC(a) - AUUCC(b)`.
    pub observed_diff: f64,
    pub p_value: f64,
    pub n_permutations: usize,
    pub seed: u64,
    pub alternative: Alternative,
    pub exact: bool,
}

/// Two-sided Monte Carlo test with the default rule and execution.
pub fn compare_auucc(
    a: &Batch,
    b: &Batch,
    coords: CoordinateSystem,
    n_perm: usize,
    seed: u64,
    window: Option<Window>,
) -> Result<TestResult> {
    let options = CompareOptions {
        coords,
        window,
        ..CompareOptions::default()
    };
    compare_auucc_with(a, b, n_perm, seed, &options)
}

pub fn compare_auucc_with(
    a: &Batch,
    b: &Batch,
    n_perm: usize,
    seed: u64,
    options: &CompareOptions,
) -> Result<TestResult> {
    check_pairing(a, b)?;
    let n = a.len();
    if options.exact && n > MAX_EXACT_N {
        return Err(UccError::ExactTestTooLarge { n, max: MAX_EXACT_N });
    }
    if !options.exact && n_perm == 0 {
        return Err(UccError::InvalidPermutationCount);
    }

    let statistic = |mask: &[u64]| -> Result<f64> {
        let (pa, pb) = swap(a, b, mask);
        Ok(area(&pa, options)? - area(&pb, options)?)
    };
    let observed = area(a, options)? - area(b, options)?;
    let extreme = |t: f64| match options.alternative {
        Alternative::TwoSided => t.abs() >= observed.abs(),
        Alternative::Less => t <= observed,
        Alternative::Greater => t >= observed,
    };

    let words = n.div_ceil(64);
    let (count, total, p_value) = if options.exact {
        let total = 1usize << n;
        let hits = map_indices(options.execution, total, |m| {
            let mut mask = vec![0u64; words.max(1)];
            mask[0] = m as u64;
            statistic(&mask).map(extreme)
        });
        let count = count_hits(hits)?;
        (count, total, count as f64 / total as f64)
    } else {
        let hits = map_indices(options.execution, n_perm, |j| {
            statistic(&random_mask(seed, j as u64, words)).map(extreme)
        });
        let count = count_hits(hits)?;
        (count, n_perm, (1 + count) as f64 / (n_perm + 1) as f64)
    };
    debug_assert!(count <= total);

    Ok(TestResult {
        observed_diff: observed,
        p_value,
        n_permutations: total,
        seed,
        alternative: options.alternative,
        exact: options.exact,
    })
}

fn count_hits(hits: Vec<Result<bool>>) -> Result<usize> {
    let mut count = 0;
    for h in hits {
        if h? {
            count += 1;
        }
    }
    Ok(count)
}

fn area(batch: &Batch, options: &CompareOptions) -> Result<f64> {
    area_under(&build_curve(batch, options.coords)?, options.window, options.rule)
}

fn check_pairing(a: &Batch, b: &Batch) -> Result<()> {
    if a.len() != b.len() {
        return Err(UccError::UnpairedBatches {
            reason: format!("lengths differ ({} vs {})", a.len(), b.len()),
        });
    }
    for (i, (sa, sb)) in a.iter().zip(b).enumerate() {
        if (sa.y() - sb.y()).abs() > PAIRING_TOLERANCE
            || (sa.y_hat() - sb.y_hat()).abs() > PAIRING_TOLERANCE
        {
            return Err(UccError::UnpairedBatches {
                reason: format!("observation or prediction differs at sample {i}"),
            });
        }
    }
    Ok(())
}

/// Swap mask of permutation `index`: bit `i` set means sample `i` trades
/// bands.
pub fn random_mask(seed: u64, index: u64, words: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    (0..words).map(|_| rng.next_u64()).collect()
}

fn swap(a: &Batch, b: &Batch, mask: &[u64]) -> (Batch, Batch) {
    let mut sa: Vec<Sample> = Vec::with_capacity(a.len());
    let mut sb: Vec<Sample> = Vec::with_capacity(b.len());
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        if mask[i / 64] >> (i % 64) & 1 == 1 {
            sa.push(x.with_bands(y.z_lower(), y.z_upper()));
            sb.push(y.with_bands(x.z_lower(), x.z_upper()));
        } else {
            sa.push(*x);
            sb.push(*y);
        }
    }
    (
        Batch::from_samples_unchecked(sa),
        Batch::from_samples_unchecked(sb),
    )
}
