//! Uncertainty characteristics curves.
//!
//! A curve traces the operating points obtained by sweeping a common scale
//! `k` over every band of a batch. Each sample is captured from its
//! critical scale onwards, so the metrics only change at critical scales
//! and the curve is a staircase with one point per distinct critical
//! scale, plus an anchor at `k = 0`.
//!
//! Construction sorts the critical scales and updates exact running sums,
//! which costs O(N log N) and reproduces [`metrics_at`] bit for bit at each
//! point.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, UccError};
use crate::exact::ExactSum;
use crate::metrics::{finish_metrics, Batch, MetricSet, Sample, Scale};

#[cfg(doc)]
use crate::metrics::metrics_at;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum XAxis {
    Bandwidth,
    Excess,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum YAxis {
    MissRate,
    Deficit,
}

/// Supported axis pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum CoordinateSystem {
    #[default]
    #[serde(rename = "bw-miss")]
    BandwidthMissRate,
    #[serde(rename = "ex-miss")]
    ExcessMissRate,
    #[serde(rename = "ex-def")]
    ExcessDeficit,
}

impl CoordinateSystem {
    pub const ALL: [CoordinateSystem; 3] = [
        CoordinateSystem::BandwidthMissRate,
        CoordinateSystem::ExcessMissRate,
        CoordinateSystem::ExcessDeficit,
    ];

    pub fn new(x: XAxis, y: YAxis) -> Option<Self> {
        match (x, y) {
            (XAxis::Bandwidth, YAxis::MissRate) => Some(CoordinateSystem::BandwidthMissRate),
            (XAxis::Excess, YAxis::MissRate) => Some(CoordinateSystem::ExcessMissRate),
            (XAxis::Excess, YAxis::Deficit) => Some(CoordinateSystem::ExcessDeficit),
            (XAxis::Bandwidth, YAxis::Deficit) => None,
        }
    }

    pub fn x_axis(&self) -> XAxis {
        match self {
            CoordinateSystem::BandwidthMissRate => XAxis::Bandwidth,
            CoordinateSystem::ExcessMissRate | CoordinateSystem::ExcessDeficit => XAxis::Excess,
        }
    }

    pub fn y_axis(&self) -> YAxis {
        match self {
            CoordinateSystem::BandwidthMissRate | CoordinateSystem::ExcessMissRate => {
                YAxis::MissRate
            }
            CoordinateSystem::ExcessDeficit => YAxis::Deficit,
        }
    }

    pub fn x_label(&self) -> &'static str {
        match self.x_axis() {
            XAxis::Bandwidth => "Bandwidth",
            XAxis::Excess => "Excess",
        }
    }

    pub fn y_label(&self) -> &'static str {
        match self.y_axis() {
            YAxis::MissRate => "Miss rate",
            YAxis::Deficit => "Deficit",
        }
    }

    pub fn token(&self) -> &'static str {
        match self {
            CoordinateSystem::BandwidthMissRate => "bw-miss",
            CoordinateSystem::ExcessMissRate => "ex-miss",
            CoordinateSystem::ExcessDeficit => "ex-def",
        }
    }
}

impl fmt::Display for CoordinateSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for CoordinateSystem {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        CoordinateSystem::ALL
            .into_iter()
            .find(|c| c.token() == s)
            .ok_or_else(|| format!("unknown coordinate system `{s}` (expected bw-miss, ex-miss or ex-def)"))
    }
}

/// Integration rule for the area under a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Rule {
    /// Right-endpoint rectangles: `sum y_j (x_j - x_{j-1})`.
    #[default]
    #[serde(rename = "rect")]
    Rectangular,
    #[serde(rename = "trap")]
    Trapezoidal,
}

impl FromStr for Rule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "rect" => Ok(Rule::Rectangular),
            "trap" => Ok(Rule::Trapezoidal),
            _ => Err(format!("unknown rule `{s}` (expected rect or trap)")),
        }
    }
}

/// Closed interval on the y-axis of a curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    lo: f64,
    hi: f64,
}

impl Window {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo < 0.0 || lo >= hi {
            return Err(UccError::InvalidWindow { lo, hi });
        }
        Ok(Window { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn contains(&self, y: f64) -> bool {
        self.lo <= y && y <= self.hi
    }
}

impl FromStr for Window {
    type Err = String;

    /// Parses `LO:HI`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (lo, hi) = s
            .split_once(':')
            .ok_or_else(|| format!("window `{s}` is not of the form LO:HI"))?;
        let lo: f64 = lo.trim().parse().map_err(|_| format!("bad window bound `{lo}`"))?;
        let hi: f64 = hi.trim().parse().map_err(|_| format!("bad window bound `{hi}`"))?;
        Window::new(lo, hi).map_err(|e| e.to_string())
    }
}

/// One scale with the metric values it induces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    /// Smallest double scale reproducing this point's captures.
    pub k: f64,
    pub miss_rate: f64,
    pub bandwidth: f64,
    pub excess: f64,
    pub deficit: f64,
}

impl OperatingPoint {
    fn from_metrics(k: f64, m: MetricSet) -> Self {
        OperatingPoint {
            k,
            miss_rate: m.miss_rate,
            bandwidth: m.bandwidth,
            excess: m.excess,
            deficit: m.deficit,
        }
    }

    pub fn metrics(&self) -> MetricSet {
        MetricSet {
            miss_rate: self.miss_rate,
            bandwidth: self.bandwidth,
            excess: self.excess,
            deficit: self.deficit,
        }
    }

    pub fn x(&self, coords: CoordinateSystem) -> f64 {
        match coords.x_axis() {
            XAxis::Bandwidth => self.bandwidth,
            XAxis::Excess => self.excess,
        }
    }

    pub fn y(&self, coords: CoordinateSystem) -> f64 {
        match coords.y_axis() {
            YAxis::MissRate => self.miss_rate,
            YAxis::Deficit => self.deficit,
        }
    }
}

/// Operating points in ascending scale order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    points: Vec<OperatingPoint>,
    coords: CoordinateSystem,
    /// Miss rate that no finite scale removes (unbounded samples).
    miss_floor: f64,
    source_n: usize,
}

impl Curve {
    pub fn points(&self) -> &[OperatingPoint] {
        &self.points
    }

    pub fn coords(&self) -> CoordinateSystem {
        self.coords
    }

    pub fn miss_floor(&self) -> f64 {
        self.miss_floor
    }

    pub fn source_n(&self) -> usize {
        self.source_n
    }

    /// Same points viewed in another coordinate system.
    pub fn with_coords(&self, coords: CoordinateSystem) -> Curve {
        Curve {
            coords,
            ..self.clone()
        }
    }

    pub fn xy(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points
            .iter()
            .map(move |p| (p.x(self.coords), p.y(self.coords)))
    }
}

struct Entry {
    scale: Scale,
    geometry: crate::metrics::Geometry,
}

/// Builds the curve of `batch`.
///
/// Samples sharing a critical scale produce a single point that reflects
/// all of their captures. Unbounded samples never produce points; they
/// raise the curve's miss floor.
pub fn build_curve(batch: &Batch, coords: CoordinateSystem) -> Result<Curve> {
    let n = batch.len();
    let mut entries: Vec<Entry> = Vec::with_capacity(n);
    let mut band_total = ExactSum::new();
    let mut missed_abs = ExactSum::new();
    let mut missed_active = ExactSum::new();
    let mut unbounded = 0usize;
    for s in batch {
        band_total.add(s.z_lower());
        band_total.add(s.z_upper());
        let g = s.geometry();
        missed_abs.add(g.abs_error);
        missed_active.add(g.active);
        match Sample::critical_scale(s) {
            Some(scale) => entries.push(Entry { scale, geometry: g }),
            None => unbounded += 1,
        }
    }
    if entries.is_empty() {
        return Err(UccError::AllUnbounded);
    }
    entries.sort_by(|a, b| a.scale.cmp_exact(&b.scale));

    // Distinct evaluation scales, each with the end of the captured prefix.
    let m = entries.len();
    let mut evals: Vec<(Scale, usize)> = Vec::new();
    let mut end = 0;
    while end < m && entries[end].scale.is_zero() {
        end += 1;
    }
    evals.push((Scale::ZERO, end));
    while end < m {
        let head = entries[end].scale;
        let mut next = end + 1;
        while next < m && entries[next].scale.cmp_exact(&head) == Ordering::Equal {
            next += 1;
        }
        evals.push((head, next));
        end = next;
    }

    // A captured sample's slack is min(k*active - |z|, k*other + |z|). The
    // far-edge branch wins once k*(active - other) > 2|z|, which is monotone
    // in k, so each sample switches at most once.
    let mut switches: Vec<Vec<usize>> = vec![Vec::new(); evals.len()];
    for (idx, e) in entries.iter().enumerate() {
        let g = e.geometry;
        if g.active <= g.other {
            continue;
        }
        let first = evals.partition_point(|(s, _)| !far_edge_nearer(*s, g));
        if first < evals.len() {
            switches[first].push(idx);
        }
    }

    let mut near_active = ExactSum::new();
    let mut near_abs = ExactSum::new();
    let mut far_other = ExactSum::new();
    let mut far_abs = ExactSum::new();
    let mut missed = n;
    let mut captured = 0;
    let mut points = Vec::with_capacity(evals.len());
    for (ei, &(scale, end)) in evals.iter().enumerate() {
        while captured < end {
            let g = entries[captured].geometry;
            missed_abs.add(-g.abs_error);
            missed_active.add(-g.active);
            near_active.add(g.active);
            near_abs.add(g.abs_error);
            missed -= 1;
            captured += 1;
        }
        for &idx in &switches[ei] {
            let g = entries[idx].geometry;
            near_active.add(-g.active);
            near_abs.add(-g.abs_error);
            far_other.add(g.other);
            far_abs.add(g.abs_error);
        }
        let (num, den) = (scale.num(), scale.den());
        let mut width = ExactSum::new();
        width.add_scaled(&band_total, num);
        let mut excess = ExactSum::new();
        excess.add_scaled(&near_active, num);
        excess.add_scaled(&near_abs, -den);
        excess.add_scaled(&far_other, num);
        excess.add_scaled(&far_abs, den);
        let mut deficit = ExactSum::new();
        deficit.add_scaled(&missed_abs, den);
        deficit.add_scaled(&missed_active, -num);
        let metrics = finish_metrics(n, missed, &width, &excess, &deficit, den);
        points.push(OperatingPoint::from_metrics(scale.threshold(), metrics));
    }

    Ok(Curve {
        points,
        coords,
        miss_floor: unbounded as f64 / n as f64,
        source_n: n,
    })
}

/// `k * other + |z| < k * active - |z|`, exactly, at `k = num / den`.
fn far_edge_nearer(scale: Scale, g: crate::metrics::Geometry) -> bool {
    let mut d = ExactSum::new();
    d.add_product(scale.num(), g.active);
    d.add_product(-scale.num(), g.other);
    d.add_product(-2.0 * scale.den(), g.abs_error);
    d.signum() == Ordering::Greater
}

fn area(curve: &Curve, rule: Rule, window: Option<Window>) -> f64 {
    let inside = |y: f64| window.is_none_or(|w| w.contains(y));
    let xy: Vec<(f64, f64)> = curve.xy().collect();
    let mut sum = ExactSum::new();
    match rule {
        Rule::Rectangular => {
            let mut prev_x = 0.0;
            for &(x, y) in &xy {
                if inside(y) {
                    sum.add_product(y, x - prev_x);
                }
                prev_x = x;
            }
            sum.value()
        }
        Rule::Trapezoidal => {
            for pair in xy.windows(2) {
                let ((x0, y0), (x1, y1)) = (pair[0], pair[1]);
                if inside(y0) && inside(y1) {
                    sum.add_product(y0, x1 - x0);
                    sum.add_product(y1, x1 - x0);
                }
            }
            sum.value() * 0.5
        }
    }
}

/// Area under the full curve.
///
/// Fails with [`UccError::PartialSupport`] when unbounded samples leave a
/// residual miss rate, since the curve then never reaches zero.
pub fn auucc(curve: &Curve, rule: Rule) -> Result<f64> {
    if curve.miss_floor > 0.0 {
        return Err(UccError::PartialSupport {
            miss_floor: curve.miss_floor,
        });
    }
    Ok(area(curve, rule, None))
}

/// Area restricted to the steps whose y-value lies in `window`.
///
/// Under the rectangular rule a step contributes when its right endpoint
/// is inside; under the trapezoidal rule both endpoints must be.
pub fn partial_auucc(curve: &Curve, window: Window, rule: Rule) -> Result<f64> {
    if curve.coords.y_axis() == YAxis::MissRate && window.hi > 1.0 {
        return Err(UccError::InvalidWindow {
            lo: window.lo,
            hi: window.hi,
        });
    }
    let last_y = curve.points.last().map(|p| p.y(curve.coords)).unwrap_or(0.0);
    if curve.miss_floor > 0.0 && window.contains(last_y) {
        return Err(UccError::PartialSupport {
            miss_floor: curve.miss_floor,
        });
    }
    if !curve.xy().any(|(_, y)| window.contains(y)) {
        return Err(UccError::EmptyWindow {
            lo: window.lo,
            hi: window.hi,
        });
    }
    Ok(area(curve, rule, Some(window)))
}

/// Full or partial area, depending on `window`.
pub fn area_under(curve: &Curve, window: Option<Window>, rule: Rule) -> Result<f64> {
    match window {
        Some(w) => partial_auucc(curve, w, rule),
        None => auucc(curve, rule),
    }
}

/// Same predictions with every band set to 1.
pub fn constant_reference(batch: &Batch) -> Batch {
    constant_bands(batch, 1.0)
}

pub(crate) fn constant_bands(batch: &Batch, band: f64) -> Batch {
    Batch::from_samples_unchecked(batch.iter().map(|s| s.with_bands(band, band)).collect())
}

/// Area of a model and of its constant-band reference, with the relative
/// gain in percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainReport {
    pub auucc_model: f64,
    pub auucc_const: f64,
    pub gain_percent: f64,
    pub partial_window: Option<Window>,
    pub coords: CoordinateSystem,
    pub rule: Rule,
}

pub fn auucc_gain(
    model: &Batch,
    coords: CoordinateSystem,
    window: Option<Window>,
    rule: Rule,
) -> Result<GainReport> {
    let model_area = area_under(&build_curve(model, coords)?, window, rule)?;
    let const_area = area_under(&build_curve(&constant_reference(model), coords)?, window, rule)?;
    if const_area == 0.0 {
        return Err(UccError::DegenerateReference);
    }
    Ok(GainReport {
        auucc_model: model_area,
        auucc_const: const_area,
        gain_percent: (const_area - model_area) / const_area * 100.0,
        partial_window: window,
        coords,
        rule,
    })
}

/// The lowest-scale point whose miss rate is at most `target`.
pub fn op_at_miss_rate(curve: &Curve, target: f64) -> Result<OperatingPoint> {
    if !(0.0..=1.0).contains(&target) {
        return Err(UccError::InvalidTarget(target));
    }
    if target < curve.miss_floor {
        return Err(UccError::UnreachableTarget {
            target,
            miss_floor: curve.miss_floor,
        });
    }
    curve
        .points
        .iter()
        .find(|p| p.miss_rate <= target)
        .copied()
        .ok_or(UccError::UnreachableTarget {
            target,
            miss_floor: curve.miss_floor,
        })
}
