//! Shared generators and independent oracles for the integration tests.
//!
//! The exact oracle evaluates every metric in big-integer fixed point and
//! rounds once at the end, using the same two-step rounding as the library
//! (quotient by the scale denominator, then division by N in floating
//! point). It shares no arithmetic code with the crate.

#![allow(dead_code)]

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use num_bigint::BigInt;
use ucc_core::{Batch, OperatingPoint};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Shape {
    /// Repeat critical scales exactly.
    pub ties: bool,
    /// Some predictions are exact.
    pub zeros: bool,
    /// Some samples have a zero band on the side of their error.
    pub unbounded: bool,
    /// Lower and upper bands differ.
    pub asymmetric: bool,
}

impl Shape {
    pub fn messy() -> Self {
        Shape {
            ties: true,
            zeros: true,
            unbounded: true,
            asymmetric: true,
        }
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Heteroscedastic regression batch with bands loosely tracking the noise.
pub fn random_batch(rng: &mut ChaCha8Rng, n: usize, shape: Shape) -> Batch {
    let mut rows: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(n);
    while rows.len() < n {
        let y_hat = 2.0 * normal(rng);
        let sigma = (0.5 * normal(rng)).exp();
        let mut err = sigma * normal(rng);
        let mut upper = sigma * rng.random_range(0.2..2.0);
        let mut lower = if shape.asymmetric {
            sigma * rng.random_range(0.2..2.0)
        } else {
            upper
        };
        if shape.zeros && rng.random::<f64>() < 0.05 {
            err = 0.0;
        }
        if shape.unbounded && rng.random::<f64>() < 0.03 {
            if err >= 0.0 {
                upper = 0.0;
            } else {
                lower = 0.0;
            }
        }
        if shape.ties && !rows.is_empty() && rng.random::<f64>() < 0.1 {
            // Doubling error and bands keeps the exact ratio.
            let (y, yh, zl, zu) = rows[rng.random_range(0..rows.len())];
            rows.push((2.0 * (y - yh), 0.0, 2.0 * zl, 2.0 * zu));
            continue;
        }
        rows.push((y_hat + err, y_hat, lower, upper));
    }
    if rows
        .iter()
        .all(|&(y, yh, zl, zu)| y != yh && (if y > yh { zu } else { zl }) == 0.0)
    {
        rows[0].2 = 1.0;
        rows[0].3 = 1.0;
    }
    Batch::from_bands(&rows).unwrap()
}

/// Batch whose critical scales are all positive and pairwise distinct.
pub fn distinct_batch(rng: &mut ChaCha8Rng, n: usize) -> Batch {
    loop {
        let b = random_batch(rng, n, Shape::default());
        let mut ks: Vec<f64> = b
            .iter()
            .map(|s| {
                let z = s.error();
                z.abs() / if z >= 0.0 { s.z_upper() } else { s.z_lower() }
            })
            .collect();
        ks.sort_by(f64::total_cmp);
        if ks[0] > 0.0 && ks.windows(2).all(|w| w[0] < w[1]) {
            return b;
        }
    }
}

/// Per-sample quantities in plain floating point.
#[derive(Debug, Clone, Copy)]
pub struct Plain {
    pub abs_error: f64,
    pub active: f64,
    pub other: f64,
    pub lower: f64,
    pub upper: f64,
}

pub fn plain(batch: &Batch) -> Vec<Plain> {
    batch
        .iter()
        .map(|s| {
            let z = s.y() - s.y_hat();
            let (active, other) = if z >= 0.0 {
                (s.z_upper(), s.z_lower())
            } else {
                (s.z_lower(), s.z_upper())
            };
            Plain {
                abs_error: z.abs(),
                active,
                other,
                lower: s.z_lower(),
                upper: s.z_upper(),
            }
        })
        .collect()
}

/// Naive evaluation of `(miss_rate, bandwidth, excess, deficit)` with every
/// band multiplied by `k`.
pub fn naive_metrics(samples: &[Plain], k: f64) -> [f64; 4] {
    let n = samples.len() as f64;
    let (mut missed, mut width, mut excess, mut deficit) = (0usize, 0.0, 0.0, 0.0);
    for s in samples {
        let (reach, far) = (k * s.active, k * s.other);
        width += k * s.lower + k * s.upper;
        if s.abs_error <= reach {
            excess += (reach - s.abs_error).min(far + s.abs_error);
        } else {
            missed += 1;
            deficit += s.abs_error - reach;
        }
    }
    [missed as f64 / n, width / (2.0 * n), excess / n, deficit / n]
}

/// Per-sample critical scales in floating point; `inf` when unbounded.
pub fn naive_scales(samples: &[Plain]) -> Vec<f64> {
    samples
        .iter()
        .map(|s| {
            if s.abs_error == 0.0 {
                0.0
            } else if s.active == 0.0 {
                f64::INFINITY
            } else {
                s.abs_error / s.active
            }
        })
        .collect()
}

pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap()
}

/// Nearest double to `r`, ties to even.
pub fn nearest(r: &BigRational) -> f64 {
    let guess = r.to_f64().unwrap();
    let mut best = guess;
    let mut best_err = (rational(guess) - r).abs();
    for c in [guess.next_down(), guess.next_up()] {
        let err = (rational(c) - r).abs();
        if err < best_err || (err == best_err && c.to_bits() & 1 == 0) {
            best = c;
            best_err = err;
        }
    }
    best
}

/// Smallest double not below `r`.
pub fn round_up(r: &BigRational) -> f64 {
    let f = nearest(r);
    if rational(f) < *r {
        f.next_up()
    } else {
        f
    }
}

const SHIFT: usize = 1074;

/// `x * 2^1074`, an integer for every finite double.
fn fixed(x: f64) -> BigInt {
    let r = rational(x);
    let scaled = r * BigRational::from_integer(BigInt::from(1) << SHIFT);
    assert!(scaled.is_integer());
    scaled.to_integer()
}

struct FixedSample {
    a: BigInt,
    act: BigInt,
    oth: BigInt,
    width: BigInt,
}

/// Literal curve construction: each distinct critical scale (and zero)
/// re-evaluates the whole batch from scratch. Quadratic in N.
pub fn literal_curve(batch: &Batch) -> Vec<OperatingPoint> {
    let samples = plain(batch);
    let n = samples.len();
    let fx: Vec<FixedSample> = samples
        .iter()
        .map(|s| FixedSample {
            a: fixed(s.abs_error),
            act: fixed(s.active),
            oth: fixed(s.other),
            width: fixed(s.lower) + fixed(s.upper),
        })
        .collect();

    // Scales as (p, q) with k = p / q, in fixed point.
    let mut scales: Vec<(BigInt, BigInt)> = vec![(BigInt::zero(), fixed(1.0))];
    for (s, f) in samples.iter().zip(&fx) {
        if s.abs_error == 0.0 || s.active == 0.0 {
            continue;
        }
        scales.push((f.a.clone(), f.act.clone()));
    }
    scales.sort_by(|(p1, q1), (p2, q2)| (p1 * q2).cmp(&(p2 * q1)));
    scales.dedup_by(|(p1, q1), (p2, q2)| &*p1 * &*q2 == &*p2 * &*q1);

    let unit = BigInt::from(1) << SHIFT;
    scales
        .iter()
        .map(|(p, q)| {
            let mut missed = 0usize;
            let mut width = BigInt::zero();
            let mut excess = BigInt::zero();
            let mut deficit = BigInt::zero();
            for f in &fx {
                let slack = p * &f.act - q * &f.a;
                if !slack.is_negative() {
                    let far = p * &f.oth + q * &f.a;
                    excess += slack.min(far);
                } else {
                    missed += 1;
                    deficit -= slack;
                }
                width += p * &f.width;
            }
            let den = q * &unit;
            let over = |num: BigInt| nearest(&BigRational::new(num, den.clone()));
            let nf = n as f64;
            OperatingPoint {
                k: round_up(&BigRational::new(p.clone(), q.clone())),
                miss_rate: missed as f64 / nf,
                bandwidth: over(width) / (2.0 * nf),
                excess: over(excess) / nf,
                deficit: over(deficit) / nf,
            }
        })
        .collect()
}

/// Sampled curve on `steps + 1` equally spaced scales in `[0, k_max]`,
/// skipping scales within a relative `1e-9` of a critical scale where
/// floating-point capture decisions are ambiguous.
pub fn grid_curve(samples: &[Plain], k_max: f64, steps: usize) -> Vec<(f64, [f64; 4])> {
    let mut ks: Vec<f64> = naive_scales(samples)
        .into_iter()
        .filter(|k| k.is_finite())
        .collect();
    ks.sort_by(f64::total_cmp);
    (0..=steps)
        .map(|j| k_max * j as f64 / steps as f64)
        .filter(|&k| {
            let i = ks.partition_point(|&c| c < k);
            let near = |c: f64| (c - k).abs() <= 1e-9 * c.abs().max(1e-300);
            !(i < ks.len() && near(ks[i])) && !(i > 0 && near(ks[i - 1]))
        })
        .map(|k| (k, naive_metrics(samples, k)))
        .collect()
}

pub fn bits(p: &OperatingPoint) -> [u64; 5] {
    [
        p.k.to_bits(),
        p.miss_rate.to_bits(),
        p.bandwidth.to_bits(),
        p.excess.to_bits(),
        p.deficit.to_bits(),
    ]
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Largest finite critical scale.
pub fn k_max(samples: &[Plain]) -> f64 {
    naive_scales(samples)
        .into_iter()
        .filter(|k| k.is_finite())
        .fold(0.0, f64::max)
}

/// Checks that every sampled scale falls on the staircase traced by
/// `points`: the miss rate equals that of the last point at or below the
/// scale, and the other metrics lie between that point and the next one.
pub fn grid_mismatch(samples: &[Plain], points: &[OperatingPoint], steps: usize) -> Option<String> {
    let top = k_max(samples) * 1.05 + 1e-9;
    for (k, m) in grid_curve(samples, top, steps) {
        let i = points.partition_point(|p| p.k <= k) - 1;
        let p = &points[i];
        let next = points.get(i + 1).unwrap_or(p);
        let tol = 1e-9;
        let within = |v: f64, lo: f64, hi: f64| v >= lo - tol * lo.abs().max(1.0) && v <= hi + tol * hi.abs().max(1.0);
        let hi_bw = if i + 1 < points.len() { next.bandwidth } else { f64::INFINITY };
        let hi_ex = if i + 1 < points.len() { next.excess } else { f64::INFINITY };
        if m[0] != p.miss_rate
            || !within(m[1], p.bandwidth, hi_bw)
            || !within(m[2], p.excess, hi_ex)
            || !within(m[3], next.deficit, p.deficit)
        {
            return Some(format!("k = {k}: grid {m:?} vs point {i} {p:?}"));
        }
    }
    None
}

/// Left Riemann sum of the miss rate against bandwidth over a uniform
/// scale grid up to the largest critical scale.
pub fn grid_integral(samples: &[Plain], steps: usize) -> f64 {
    let top = k_max(samples);
    let mut area = 0.0;
    let mut prev = naive_metrics(samples, 0.0);
    for j in 1..=steps {
        let m = naive_metrics(samples, top * j as f64 / steps as f64);
        area += prev[0] * (m[1] - prev[1]);
        prev = m;
    }
    area
}

/// Per-sample x-values at their own critical scales, sorted.
pub fn own_scale_x(batch: &Batch, excess_axis: bool) -> Vec<f64> {
    let samples = plain(batch);
    let mut xs: Vec<f64> = naive_scales(&samples)
        .into_iter()
        .map(|k| {
            let m = naive_metrics(&samples, k);
            if excess_axis {
                m[2]
            } else {
                m[1]
            }
        })
        .collect();
    xs.sort_by(f64::total_cmp);
    xs
}
