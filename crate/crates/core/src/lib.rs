//! Evaluation of regression prediction intervals with uncertainty
//! characteristics curves.
//!
//! Every band of a batch is multiplied by a common scale `k`; sweeping `k`
//! traces a staircase of operating points trading interval width against
//! misses. The area under that staircase, compared with the area obtained
//! from constant bands, measures how informative the bands are
//! independently of any single scale.
//!
//! ```
//! use ucc_core::{auucc, build_curve, Batch, CoordinateSystem, Rule};
//!
//! let batch = Batch::from_bands(&[(0.0, 0.0, 1.0, 1.0), (2.0, 0.0, 1.0, 1.0)])?;
//! let curve = build_curve(&batch, CoordinateSystem::BandwidthMissRate)?;
//! assert_eq!(curve.xy().collect::<Vec<_>>(), vec![(0.0, 0.5), (2.0, 0.0)]);
//! assert_eq!(auucc(&curve, Rule::Trapezoidal)?, 0.5);
//! # Ok::<(), ucc_core::UccError>(())
//! ```

pub mod calibration;
pub mod cost;
pub mod curve;
pub mod error;
mod exact;
pub mod exec;
pub mod fixture;
pub mod inference;
pub mod io;
pub mod metrics;
pub mod report;
pub mod svg;

pub use calibration::{apply_calibration, conformal_scale, CalibrationResult};
pub use cost::{
    cost_at, interval_score, isocost_slope, mean_absolute_error_check, min_cost, CostCurve,
};
pub use curve::{
    area_under, auucc, auucc_gain, build_curve, constant_reference, op_at_miss_rate,
    partial_auucc, CoordinateSystem, Curve, GainReport, OperatingPoint, Rule, Window,
};
pub use error::{Result, UccError};
pub use exec::Execution;
pub use fixture::{generate_gap_fixture, GapFixture};
pub use inference::{compare_auucc, compare_auucc_with, Alternative, CompareOptions, TestResult};
pub use io::{read_batch, InputFormat, ReadError};
pub use metrics::{
    bandwidth, critical_scales, deficit, excess, metrics_at, miss_rate, scale_batch,
    validate_batch, Batch, CriticalScaleSet, MetricSet, Sample, Scale,
};
pub use report::{CurveSummary, Report};
pub use svg::{render_svg, Isocost};
