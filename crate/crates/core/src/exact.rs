//! Exact floating-point accumulation.
//!
//! A sum is held as a list of non-overlapping partials (Shewchuk's
//! algorithm, the one behind Python's `math.fsum`). Reading it back yields
//! the correctly rounded value of the exact real sum, so a metric computed
//! this way depends only on the multiset of terms, never on their order or
//! on the route taken to accumulate them. The curve builder relies on this
//! to reproduce a direct per-scale evaluation bit for bit.
//!
//! Inputs are assumed finite and far from the overflow threshold.

use std::cmp::Ordering;

/// `a * b` as a pair `(p, e)` with `p + e == a * b` exactly.
#[inline]
pub(crate) fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[derive(Clone, Debug, Default)]
pub(crate) struct ExactSum {
    partials: Vec<f64>,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let mut x = value;
        let mut kept = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        self.partials.truncate(kept);
        self.partials.push(x);
    }

    /// Adds the exact product `a * b`.
    pub fn add_product(&mut self, a: f64, b: f64) {
        let (p, e) = two_prod(a, b);
        self.add(p);
        if e != 0.0 {
            self.add(e);
        }
    }

    /// Adds `factor * other` exactly.
    pub fn add_scaled(&mut self, other: &ExactSum, factor: f64) {
        for &p in &other.partials {
            self.add_product(factor, p);
        }
    }

    pub fn add_sum(&mut self, other: &ExactSum) {
        for &p in &other.partials {
            self.add(p);
        }
    }

    pub fn sub_sum(&mut self, other: &ExactSum) {
        for &p in &other.partials {
            self.add(-p);
        }
    }

    /// The exact sum rounded to the nearest double, ties to even.
    pub fn value(&self) -> f64 {
        let p = &self.partials;
        let mut n = p.len();
        if n == 0 {
            return 0.0;
        }
        n -= 1;
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            n -= 1;
            let y = p[n];
            hi = x + y;
            let yr = hi - x;
            lo = y - yr;
            if lo != 0.0 {
                break;
            }
        }
        // Half-way cases need the sign of everything below `lo`.
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            let yr = x - hi;
            if y == yr {
                hi = x;
            }
        }
        hi
    }

    /// Sign of the exact sum. Exact because a non-zero sum of doubles never
    /// rounds to zero.
    pub fn signum(&self) -> Ordering {
        self.value()
            .partial_cmp(&0.0)
            .expect("exact sums of finite values are never NaN")
    }
}

/// Sign of `sum - q * d`, exactly.
fn residual_sign(sum: &ExactSum, q: f64, d: f64) -> Ordering {
    let mut r = sum.clone();
    r.add_product(-q, d);
    r.signum()
}

/// `sum / d` rounded to the nearest double (ties to even), for `d > 0`.
pub(crate) fn div_rounded(sum: &ExactSum, d: f64) -> f64 {
    debug_assert!(d > 0.0 && d.is_finite());
    let approx = sum.value();
    if d == 1.0 {
        return approx;
    }
    let mut q = approx / d;
    if !q.is_finite() {
        return q;
    }
    loop {
        match residual_sign(sum, q, d) {
            Ordering::Equal => return q,
            Ordering::Greater => {
                let up = q.next_up();
                match residual_sign(sum, up, d) {
                    Ordering::Equal => return up,
                    Ordering::Less => return nearer(sum, q, up, d),
                    Ordering::Greater => q = up,
                }
            }
            Ordering::Less => {
                let down = q.next_down();
                match residual_sign(sum, down, d) {
                    Ordering::Equal => return down,
                    Ordering::Greater => return nearer(sum, down, q, d),
                    Ordering::Less => q = down,
                }
            }
        }
    }
}

/// Picks whichever of the adjacent doubles `lo < hi` is closer to
/// `sum / d`, which is known to lie strictly between them.
fn nearer(sum: &ExactSum, lo: f64, hi: f64, d: f64) -> f64 {
    // sign(2 sum - (lo + hi) d) compares the quotient with the midpoint.
    let mut m = ExactSum::new();
    m.add_scaled(sum, 2.0);
    m.add_product(-lo, d);
    m.add_product(-hi, d);
    match m.signum() {
        Ordering::Less => lo,
        Ordering::Greater => hi,
        Ordering::Equal => {
            if lo.to_bits() & 1 == 0 {
                lo
            } else {
                hi
            }
        }
    }
}
