use thiserror::Error;

pub type Result<T, E = UccError> = std::result::Result<T, E>;

/// Errors raised by the evaluation routines.
///
/// Variants that concern a single sample carry its zero-based index in the
/// batch.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum UccError {
    #[error("sample {index}: non-finite value")]
    NonFiniteValue { index: usize },

    #[error("sample {index}: interval bound lies on the wrong side of the prediction")]
    NegativeBand { index: usize },

    #[error("batch is empty")]
    EmptyBatch,

    #[error("invalid scale {0}: scales must be finite and non-negative")]
    InvalidScale(f64),

    #[error("no sample has a finite critical scale")]
    AllUnbounded,

    #[error("curve has a residual miss rate of {miss_floor}; the full area diverges, use a partial window")]
    PartialSupport { miss_floor: f64 },

    #[error("no curve point falls inside the window [{lo}, {hi}]")]
    EmptyWindow { lo: f64, hi: f64 },

    #[error("invalid window [{lo}, {hi}]")]
    InvalidWindow { lo: f64, hi: f64 },

    #[error("constant-band reference has zero area (all predictions exact)")]
    DegenerateReference,

    #[error("miss rate {target} is below the curve's floor of {miss_floor}")]
    UnreachableTarget { target: f64, miss_floor: f64 },

    #[error("invalid miss-rate target {0}")]
    InvalidTarget(f64),

    #[error("invalid miss level alpha = {0}; expected 0 < alpha < 1")]
    InvalidAlpha(f64),

    #[error("calibration needs rank {rank} but only {n} samples are available")]
    InsufficientCalibrationData { rank: usize, n: usize },

    #[error("{count} calibration scores are unbounded (non-zero error with a zero band)")]
    UnboundedScores { count: usize },

    #[error("batches are not paired: {reason}")]
    UnpairedBatches { reason: String },

    #[error("number of permutations must be at least 1")]
    InvalidPermutationCount,

    #[error("exact enumeration supports at most {max} samples, got {n}")]
    ExactTestTooLarge { n: usize, max: usize },

    #[error("invalid trade-off factor c = {0}; expected 0 <= c <= 1")]
    InvalidTradeoff(f64),

    #[error("sample {index}: lower and upper bands differ")]
    AsymmetricBands { index: usize },

    #[error("curves use different coordinate systems")]
    MixedCoordinates,

    #[error("nothing to render")]
    NoCurves,

    #[error("fixture size must be at least {min}, got {n}")]
    FixtureTooSmall { n: usize, min: usize },
}

impl UccError {
    /// Stable variant name, used when errors cross a process or language
    /// boundary.
    pub fn name(&self) -> &'static str {
        match self {
            UccError::NonFiniteValue { .. } => "NonFiniteValue",
            UccError::NegativeBand { .. } => "NegativeBand",
            UccError::EmptyBatch => "EmptyBatch",
            UccError::InvalidScale(_) => "InvalidScale",
            UccError::AllUnbounded => "AllUnbounded",
            UccError::PartialSupport { .. } => "PartialSupport",
            UccError::EmptyWindow { .. } => "EmptyWindow",
            UccError::InvalidWindow { .. } => "InvalidWindow",
            UccError::DegenerateReference => "DegenerateReference",
            UccError::UnreachableTarget { .. } => "UnreachableTarget",
            UccError::InvalidTarget(_) => "InvalidTarget",
            UccError::InvalidAlpha(_) => "InvalidAlpha",
            UccError::InsufficientCalibrationData { .. } => "InsufficientCalibrationData",
            UccError::UnboundedScores { .. } => "UnboundedScores",
            UccError::UnpairedBatches { .. } => "UnpairedBatches",
            UccError::InvalidPermutationCount => "InvalidPermutationCount",
            UccError::ExactTestTooLarge { .. } => "ExactTestTooLarge",
            UccError::InvalidTradeoff(_) => "InvalidTradeoff",
            UccError::AsymmetricBands { .. } => "AsymmetricBands",
            UccError::MixedCoordinates => "MixedCoordinates",
            UccError::NoCurves => "NoCurves",
            UccError::FixtureTooSmall { .. } => "FixtureTooSmall",
        }
    }
}
