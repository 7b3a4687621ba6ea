//! Split-conformal calibration of a common band scale.
//!
//! The conformity score of a sample is its critical scale, which reduces
//! to `|y - y_hat| / z` for symmetric bands. Scaling every band by the
//! rank-`ceil((n + 1)(1 - alpha))` score captures at least that many
//! calibration samples.

use serde::{Deserialize, Serialize};

use crate::error::{Result, UccError};
use crate::metrics::{metrics_at, scale_batch, Batch, Scale};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub q_hat: f64,
    pub alpha: f64,
    pub n: usize,
    /// One-based rank of `q_hat` among the sorted scores.
    pub rank: usize,
    /// Coverage on the calibration batch after scaling by `q_hat`.
    pub achieved_coverage: f64,
}

/// `ceil((n + 1)(1 - alpha))`, ignoring round-off just above an integer.
pub fn conformal_rank(n: usize, alpha: f64) -> Result<usize> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(UccError::InvalidAlpha(alpha));
    }
    let target = (n as f64 + 1.0) * (1.0 - alpha);
    Ok(((target - 1e-9).ceil() as usize).max(1))
}

pub fn conformal_scale(cal: &Batch, alpha: f64) -> Result<CalibrationResult> {
    let n = cal.len();
    let rank = conformal_rank(n, alpha)?;
    if rank > n {
        return Err(UccError::InsufficientCalibrationData { rank, n });
    }
    let mut scores = Vec::with_capacity(n);
    let mut unbounded = 0;
    for s in cal {
        match s.critical_scale() {
            Some(scale) => scores.push(scale.threshold()),
            None => unbounded += 1,
        }
    }
    if unbounded > 0 {
        return Err(UccError::UnboundedScores { count: unbounded });
    }
    scores.sort_by(f64::total_cmp);
    let q_hat = scores[rank - 1];
    let miss = metrics_at(cal, Scale::new(q_hat)?).miss_rate;
    Ok(CalibrationResult {
        q_hat,
        alpha,
        n,
        rank,
        achieved_coverage: 1.0 - miss,
    })
}

/// Multiplies every band of `batch` by the calibrated scale.
pub fn apply_calibration(batch: &Batch, result: &CalibrationResult) -> Result<Batch> {
    scale_batch(batch, result.q_hat)
}
