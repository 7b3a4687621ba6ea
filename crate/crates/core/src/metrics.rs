//! Samples, batches and the four interval cost metrics.
//!
//! Intervals are stored in band form: a sample holds the observation `y`,
//! the prediction `y_hat` and the non-negative distances `z_lower`,
//! `z_upper` from the prediction to the interval edges. Scaling by `k`
//! multiplies both bands.
//!
//! Capture is decided in exact arithmetic on the observed error
//! `z = y - y_hat`: a sample is captured at scale `k` iff
//! `-k * z_lower <= z <= k * z_upper`, with both edges inclusive. All
//! N-term sums are exact and rounded once, so every metric is independent
//! of sample order.

use std::cmp::Ordering;

use crate::error::{Result, UccError};
use crate::exact::{div_rounded, ExactSum};

/// One observation with its point prediction and interval bands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    y: f64,
    y_hat: f64,
    z_lower: f64,
    z_upper: f64,
}

/// Error magnitude and the bands on the near ("active") and far side of
/// the prediction.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Geometry {
    pub abs_error: f64,
    pub active: f64,
    pub other: f64,
}

impl Sample {
    /// Builds a sample from bands. `index` is only used to label errors.
    pub fn from_bands(index: usize, y: f64, y_hat: f64, z_lower: f64, z_upper: f64) -> Result<Self> {
        let s = Sample {
            y,
            y_hat,
            z_lower,
            z_upper,
        };
        s.check(index)?;
        Ok(s)
    }

    /// Builds a sample from interval bounds `[y_lower, y_upper]`.
    pub fn from_bounds(index: usize, y: f64, y_hat: f64, y_lower: f64, y_upper: f64) -> Result<Self> {
        if ![y, y_hat, y_lower, y_upper].iter().all(|v| v.is_finite()) {
            return Err(UccError::NonFiniteValue { index });
        }
        if y_lower > y_hat || y_upper < y_hat {
            return Err(UccError::NegativeBand { index });
        }
        Self::from_bands(index, y, y_hat, y_hat - y_lower, y_upper - y_hat)
    }

    fn check(&self, index: usize) -> Result<()> {
        let all_finite = [self.y, self.y_hat, self.z_lower, self.z_upper]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite || !self.error().is_finite() {
            return Err(UccError::NonFiniteValue { index });
        }
        if self.z_lower < 0.0 || self.z_upper < 0.0 {
            return Err(UccError::NegativeBand { index });
        }
        Ok(())
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn y_hat(&self) -> f64 {
        self.y_hat
    }

    pub fn z_lower(&self) -> f64 {
        self.z_lower
    }

    pub fn z_upper(&self) -> f64 {
        self.z_upper
    }

    pub fn lower(&self) -> f64 {
        self.y_hat - self.z_lower
    }

    pub fn upper(&self) -> f64 {
        self.y_hat + self.z_upper
    }

    /// Observed error `y - y_hat`.
    pub fn error(&self) -> f64 {
        self.y - self.y_hat
    }

    pub(crate) fn geometry(&self) -> Geometry {
        let z = self.error();
        if z >= 0.0 {
            Geometry {
                abs_error: z,
                active: self.z_upper,
                other: self.z_lower,
            }
        } else {
            Geometry {
                abs_error: -z,
                active: self.z_lower,
                other: self.z_upper,
            }
        }
    }

    pub(crate) fn with_bands(&self, z_lower: f64, z_upper: f64) -> Sample {
        Sample {
            z_lower,
            z_upper,
            ..*self
        }
    }

    /// The smallest scale at which this sample is captured, as an exact
    /// ratio. `None` when the error is non-zero but the active band is zero.
    pub fn critical_scale(&self) -> Option<Scale> {
        let g = self.geometry();
        if g.abs_error == 0.0 {
            Some(Scale::ZERO)
        } else if g.active == 0.0 {
            None
        } else {
            Some(Scale {
                num: g.abs_error,
                den: g.active,
            })
        }
    }
}

/// A non-empty, validated, ordered collection of samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    samples: Vec<Sample>,
}

impl Batch {
    pub fn new(samples: Vec<Sample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(UccError::EmptyBatch);
        }
        Ok(Batch { samples })
    }

    /// Validates `(y, y_hat, z_lower, z_upper)` tuples.
    pub fn from_bands(rows: &[(f64, f64, f64, f64)]) -> Result<Self> {
        let samples = rows
            .iter()
            .enumerate()
            .map(|(i, &(y, y_hat, lo, hi))| Sample::from_bands(i, y, y_hat, lo, hi))
            .collect::<Result<Vec<_>>>()?;
        Batch::new(samples)
    }

    /// Validates `(y, y_hat, y_lower, y_upper)` tuples and converts them to
    /// band form.
    pub fn from_bounds(rows: &[(f64, f64, f64, f64)]) -> Result<Self> {
        let samples = rows
            .iter()
            .enumerate()
            .map(|(i, &(y, y_hat, lo, hi))| Sample::from_bounds(i, y, y_hat, lo, hi))
            .collect::<Result<Vec<_>>>()?;
        Batch::new(samples)
    }

    pub(crate) fn from_samples_unchecked(samples: Vec<Sample>) -> Self {
        debug_assert!(!samples.is_empty());
        Batch { samples }
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Sample> {
        self.samples.iter()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

impl<'a> IntoIterator for &'a Batch {
    type Item = &'a Sample;
    type IntoIter = std::slice::Iter<'a, Sample>;

    fn into_iter(self) -> Self::IntoIter {
        self.samples.iter()
    }
}

/// Equivalent to [`Batch::from_bounds`].
pub fn validate_batch(raw: &[(f64, f64, f64, f64)]) -> Result<Batch> {
    Batch::from_bounds(raw)
}

/// A non-negative scale held as the exact ratio `num / den` of two doubles.
///
/// Critical scales are quotients that are usually not representable;
/// keeping them as ratios lets the curve evaluate each one exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scale {
    num: f64,
    den: f64,
}

impl Scale {
    pub const ZERO: Scale = Scale { num: 0.0, den: 1.0 };
    pub const ONE: Scale = Scale { num: 1.0, den: 1.0 };

    pub fn new(k: f64) -> Result<Self> {
        if !k.is_finite() || k < 0.0 {
            return Err(UccError::InvalidScale(k));
        }
        Ok(Scale { num: k, den: 1.0 })
    }

    pub fn ratio(num: f64, den: f64) -> Result<Self> {
        if !num.is_finite() || num < 0.0 || !den.is_finite() || den <= 0.0 {
            return Err(UccError::InvalidScale(num / den));
        }
        Ok(Scale { num, den })
    }

    pub fn num(&self) -> f64 {
        self.num
    }

    pub fn den(&self) -> f64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0.0
    }

    /// Nearest double.
    pub fn value(&self) -> f64 {
        self.num / self.den
    }

    /// The smallest double `k` with `k >= num / den`. Scaling a batch by it
    /// captures exactly the samples whose critical scale is at most this
    /// ratio (up to ties within one ulp).
    pub fn threshold(&self) -> f64 {
        let q = self.num / self.den;
        if !q.is_finite() {
            return q;
        }
        let mut r = ExactSum::new();
        r.add_product(q, self.den);
        r.add(-self.num);
        if r.signum() == Ordering::Less {
            q.next_up()
        } else {
            q
        }
    }

    /// Exact comparison of the two ratios.
    pub fn cmp_exact(&self, other: &Scale) -> Ordering {
        let mut d = ExactSum::new();
        d.add_product(self.num, other.den);
        d.add_product(-other.num, self.den);
        d.signum()
    }
}

impl TryFrom<f64> for Scale {
    type Error = UccError;

    fn try_from(k: f64) -> Result<Self> {
        Scale::new(k)
    }
}

/// Per-sample critical scales.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalScaleSet {
    /// Capture threshold of each sample (see [`Scale::threshold`]);
    /// `f64::INFINITY` marks an unbounded sample.
    pub scales: Vec<f64>,
    /// Number of samples with a non-zero error and a zero active band.
    pub unbounded_count: usize,
    exact: Vec<Option<Scale>>,
}

impl CriticalScaleSet {
    /// Exact ratio for sample `i`, `None` if unbounded.
    pub fn exact(&self, i: usize) -> Option<Scale> {
        self.exact[i]
    }

    pub fn finite_count(&self) -> usize {
        self.scales.len() - self.unbounded_count
    }
}

pub fn critical_scales(batch: &Batch) -> CriticalScaleSet {
    let exact: Vec<Option<Scale>> = batch.iter().map(Sample::critical_scale).collect();
    let scales = exact
        .iter()
        .map(|s| s.map_or(f64::INFINITY, |s| s.threshold()))
        .collect();
    let unbounded_count = exact.iter().filter(|s| s.is_none()).count();
    CriticalScaleSet {
        scales,
        unbounded_count,
        exact,
    }
}

/// The four cost metrics of one (possibly rescaled) batch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSet {
    pub miss_rate: f64,
    pub bandwidth: f64,
    pub excess: f64,
    pub deficit: f64,
}

/// Evaluates all four metrics on the batch with every band multiplied by
/// `scale`, without rounding the scaled bands.
///
/// This is the direct O(N) evaluation; [`crate::curve::build_curve`]
/// produces bit-identical values incrementally.
pub fn metrics_at(batch: &Batch, scale: Scale) -> MetricSet {
    let Scale { num, den } = scale;
    let mut missed = 0usize;
    let mut excess = ExactSum::new();
    let mut deficit = ExactSum::new();
    let mut width = ExactSum::new();
    for s in batch {
        let g = s.geometry();
        // den * (distance from y to the active edge), signed: >= 0 iff captured.
        let mut slack = ExactSum::new();
        slack.add_product(num, g.active);
        slack.add_product(-den, g.abs_error);
        if slack.signum() != Ordering::Less {
            let mut far = ExactSum::new();
            far.add_product(num, g.other);
            far.add_product(den, g.abs_error);
            let mut diff = far.clone();
            diff.sub_sum(&slack);
            if diff.signum() == Ordering::Less {
                excess.add_sum(&far);
            } else {
                excess.add_sum(&slack);
            }
        } else {
            missed += 1;
            deficit.sub_sum(&slack);
        }
        width.add_product(num, s.z_lower);
        width.add_product(num, s.z_upper);
    }
    finish_metrics(batch.len(), missed, &width, &excess, &deficit, den)
}

/// Shared final rounding step: exact numerators over `den`, then over N.
pub(crate) fn finish_metrics(
    n: usize,
    missed: usize,
    width: &ExactSum,
    excess: &ExactSum,
    deficit: &ExactSum,
    den: f64,
) -> MetricSet {
    let n = n as f64;
    MetricSet {
        miss_rate: missed as f64 / n,
        bandwidth: div_rounded(width, den) / (2.0 * n),
        excess: div_rounded(excess, den) / n,
        deficit: div_rounded(deficit, den) / n,
    }
}

/// Fraction of samples strictly outside their interval.
pub fn miss_rate(batch: &Batch) -> f64 {
    let missed = batch
        .iter()
        .filter(|s| {
            let g = s.geometry();
            g.abs_error > g.active
        })
        .count();
    missed as f64 / batch.len() as f64
}

/// Mean interval half-width.
pub fn bandwidth(batch: &Batch) -> f64 {
    let mut width = ExactSum::new();
    for s in batch {
        width.add(s.z_lower);
        width.add(s.z_upper);
    }
    width.value() / (2.0 * batch.len() as f64)
}

/// Mean slack between a captured observation and its nearer interval edge;
/// missed samples contribute zero.
pub fn excess(batch: &Batch) -> f64 {
    metrics_at(batch, Scale::ONE).excess
}

/// Mean distance from a missed observation to its nearer interval edge;
/// captured samples contribute zero.
pub fn deficit(batch: &Batch) -> f64 {
    metrics_at(batch, Scale::ONE).deficit
}

/// Returns a copy of the batch with both bands of every sample multiplied
/// by `k`.
pub fn scale_batch(batch: &Batch, k: f64) -> Result<Batch> {
    Scale::new(k)?;
    let samples: Vec<Sample> = batch
        .iter()
        .map(|s| s.with_bands(s.z_lower * k, s.z_upper * k))
        .collect();
    if samples
        .iter()
        .any(|s| !s.z_lower.is_finite() || !s.z_upper.is_finite())
    {
        return Err(UccError::InvalidScale(k));
    }
    Ok(Batch::from_samples_unchecked(samples))
}

#[cfg(test)]
/// `(a * b)` compared with `c` exactly.
pub(crate) fn cmp_product(a: f64, b: f64, c: f64) -> Ordering {
    let (p, e) = crate::exact::two_prod(a, b);
    let mut s = ExactSum::new();
    s.add(p);
    s.add(e);
    s.add(-c);
    s.signum()
}
