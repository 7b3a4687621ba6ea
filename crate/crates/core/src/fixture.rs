//! Synthetic one-dimensional regression data with a gap in the inputs.
//!
//! Most inputs lie in `1 <= |x| <= 4` where the noise is small and
//! bounded; a minority fall inside the gap `[-1, 1]` where the noise is
//! Gaussian and much wider. Predictions are the noiseless function and the
//! informative bands are the true local noise scale, so a good model widens
//! its intervals exactly where the data are unreliable.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Result, UccError};
use crate::metrics::{Batch, Sample};

pub const MIN_FIXTURE_SIZE: usize = 10;

const GAP_FRACTION: f64 = 0.3;
const GAP_SCALE: f64 = 1.0;
const OUTSIDE_SCALE: f64 = 0.15;

#[derive(Debug, Clone, PartialEq)]
pub struct GapFixture {
    pub inputs: Vec<f64>,
    /// Bands equal to the local noise scale.
    pub informative: Batch,
    /// Same samples with the informative bands randomly permuted.
    pub shuffled: Batch,
    pub description: String,
}

pub fn target(x: f64) -> f64 {
    x * (1.5 * x).sin()
}

pub fn generate_gap_fixture(n: usize, seed: u64) -> Result<GapFixture> {
    if n < MIN_FIXTURE_SIZE {
        return Err(UccError::FixtureTooSmall {
            n,
            min: MIN_FIXTURE_SIZE,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inputs = Vec::with_capacity(n);
    let mut scales = Vec::with_capacity(n);
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let (x, scale, noise) = if rng.random::<f64>() < GAP_FRACTION {
            let x = rng.random_range(-1.0..1.0);
            let e: f64 = StandardNormal.sample(&mut rng);
            (x, GAP_SCALE, GAP_SCALE * e)
        } else {
            let side = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let x = side * rng.random_range(1.0..=4.0);
            (x, OUTSIDE_SCALE, rng.random_range(-OUTSIDE_SCALE..=OUTSIDE_SCALE))
        };
        let y_hat = target(x);
        inputs.push(x);
        scales.push(scale);
        samples.push(Sample::from_bands(i, y_hat + noise, y_hat, scale, scale)?);
    }
    let informative = Batch::new(samples)?;

    let mut shuffled_scales = scales;
    shuffled_scales.shuffle(&mut rng);
    let shuffled = Batch::new(
        informative
            .iter()
            .zip(&shuffled_scales)
            .map(|(s, &z)| s.with_bands(z, z))
            .collect(),
    )?;

    let inside = inputs.iter().filter(|x| x.abs() < 1.0).count();
    let description = format!(
        "gap fixture: n={n}, seed={seed}, {inside} inputs inside the gap [-1, 1]; \
         y = x sin(1.5 x) + noise, gaussian noise (sd {GAP_SCALE}) inside the gap, \
         uniform noise on [-{OUTSIDE_SCALE}, {OUTSIDE_SCALE}] outside; \
         informative bands equal the local noise scale, shuffled bands permute them"
    );
    Ok(GapFixture {
        inputs,
        informative,
        shuffled,
        description,
    })
}
