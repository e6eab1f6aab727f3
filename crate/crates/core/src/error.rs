use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the measure, transform and convolution machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("atom {index}: {reason}")]
    InvalidAtom { index: usize, reason: String },

    #[error("total mass {mass} differs from 1")]
    NotProbability { mass: f64 },

    #[error("evaluation point {0} lies in the rejection band around the unit circle")]
    OnTorus(Complex64),

    #[error("eta has a pole at {0} (1 + psi vanishes)")]
    EtaPole(Complex64),

    #[error("Newton inversion failed to converge at {point}")]
    NoConvergence { point: Complex64 },

    #[error("mean modulus {0:e} is below the membership threshold")]
    MeanBelowThreshold(f64),

    #[error("measure is not in the class P×: {0}")]
    NotInPx(String),

    #[error("vanishing denominator at ({z}, {w})")]
    VanishingDenominator { z: Complex64, w: Complex64 },

    #[error("admissible window exhausted at radius {radius}")]
    WindowExhausted { radius: f64 },

    #[error("point ({z}, {w}) is outside the bidisk")]
    OutsideBidisk { z: Complex64, w: Complex64 },

    #[error("division by a series with zero constant term")]
    NonUnitSeries,

    #[error("logarithm of a series whose constant term lies on the branch cut")]
    BranchCut,

    #[error("composition needs an inner series with zero constant term")]
    NonzeroInnerConstant,

    #[error("series reversion needs c0 = 0 and c1 != 0")]
    NotRevertible,

    #[error("truncation orders differ ({0} vs {1})")]
    OrderMismatch(usize, usize),

    #[error("labels do not alternate at position {0}")]
    NonAlternating(usize),

    #[error("measure is not centered: {0}")]
    NotCentered(String),

    #[error("incompatible Lévy data: {0}")]
    IncompatibleLevy(String),

    #[error("conditioning guard refused cell ({p}, {q}): amplification {amplification:e}")]
    Conditioning { p: i32, q: i32, amplification: f64 },

    #[error("diagnostics check failed: {0}")]
    Diagnostics(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
