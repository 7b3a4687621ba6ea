//! Linear operating-point cost and the scoring-rule identities built on the
//! excess and deficit metrics.

use serde::{Deserialize, Serialize};

use crate::curve::{build_curve, CoordinateSystem};
use crate::error::{Result, UccError};
use crate::exact::ExactSum;
use crate::metrics::{metrics_at, Batch, Scale};

fn check_tradeoff(c: f64) -> Result<()> {
    if (0.0..=1.0).contains(&c) {
        Ok(())
    } else {
        Err(UccError::InvalidTradeoff(c))
    }
}

/// `c * bandwidth + (1 - c) * miss_rate` at scale `k`.
pub fn cost_at(batch: &Batch, k: f64, c: f64) -> Result<f64> {
    check_tradeoff(c)?;
    let m = metrics_at(batch, Scale::new(k)?);
    Ok(c * m.bandwidth + (1.0 - c) * m.miss_rate)
}

/// `c * bandwidth + (1 - c) * deficit` at scale `k`.
pub fn deficit_cost_at(batch: &Batch, k: f64, c: f64) -> Result<f64> {
    check_tradeoff(c)?;
    let m = metrics_at(batch, Scale::new(k)?);
    Ok(c * m.bandwidth + (1.0 - c) * m.deficit)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostCurve {
    pub c: f64,
    /// `(k, cost)` at `k = 0` and at every finite critical scale.
    pub evaluations: Vec<(f64, f64)>,
    pub k_star: f64,
    pub min_cost: f64,
}

/// Minimises the linear cost over the scale.
///
/// Between critical scales the miss rate is constant and the bandwidth
/// grows, so the minimum is attained at `k = 0` or at a critical scale.
/// Ties go to the smaller scale.
pub fn min_cost(batch: &Batch, c: f64) -> Result<CostCurve> {
    check_tradeoff(c)?;
    let curve = build_curve(batch, CoordinateSystem::BandwidthMissRate)?;
    let evaluations: Vec<(f64, f64)> = curve
        .points()
        .iter()
        .map(|p| (p.k, c * p.bandwidth + (1.0 - c) * p.miss_rate))
        .collect();
    let (k_star, min_cost) = evaluations
        .iter()
        .copied()
        .fold((f64::NAN, f64::INFINITY), |best, (k, v)| {
            if v < best.1 {
                (k, v)
            } else {
                best
            }
        });
    Ok(CostCurve {
        c,
        evaluations,
        k_star,
        min_cost,
    })
}

/// Slope of the lines of equal cost in bandwidth / miss-rate coordinates.
pub fn isocost_slope(c: f64) -> Result<f64> {
    check_tradeoff(c)?;
    Ok(-c / (1.0 - c))
}

/// `(0.5 * excess + 0.5 * deficit, mean | |y - y_hat| - k * z |)` at scale
/// `k`, for symmetric bands. The first value is half the second.
pub fn mean_absolute_error_check(batch: &Batch, k: f64) -> Result<(f64, f64)> {
    let scale = Scale::new(k)?;
    for (index, s) in batch.iter().enumerate() {
        if (s.z_lower() - s.z_upper()).abs() > 1e-12 {
            return Err(UccError::AsymmetricBands { index });
        }
    }
    let m = metrics_at(batch, scale);
    let cost_based = 0.5 * m.excess + 0.5 * m.deficit;
    let mut sum = ExactSum::new();
    for s in batch {
        sum.add((s.error().abs() - k * s.z_upper()).abs());
    }
    Ok((cost_based, sum.value() / batch.len() as f64))
}

/// Mean interval score at miss level `alpha`: width plus `2 / alpha` times
/// the distance by which the observation falls outside the interval.
pub fn interval_score(batch: &Batch, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(UccError::InvalidAlpha(alpha));
    }
    let mut width = ExactSum::new();
    let mut violation = ExactSum::new();
    for s in batch {
        width.add(s.upper() - s.lower());
        if s.y() < s.lower() {
            violation.add(s.lower() - s.y());
        } else if s.y() > s.upper() {
            violation.add(s.y() - s.upper());
        }
    }
    let n = batch.len() as f64;
    Ok(width.value() / n + 2.0 / alpha * (violation.value() / n))
}
