//! Series analysis toolkit for coefficient sequences whose asymptotics are
//! either algebraic, `A * mu^n * n^g`, or stretched-exponential,
//! `B * mu^n * mu1^(n^sigma) * n^g`.
//!
//! The crate provides exact generating-function arithmetic over
//! arbitrary-precision rationals, benchmark coefficient generators, the ratio
//! method with sigma estimators, Bulirsch-Stoer sequence extrapolation, sliding
//! direct fits, Pade and differential approximants, and the stretch-removing
//! transform. All inexact arithmetic runs at a configurable precision
//! (256 bits by default).

pub mod approximants;
pub mod exact;
pub mod extrapolate;
pub mod fitting;
pub mod generators;
pub mod linalg;
pub mod poly;
pub mod precision;
pub mod ratio;
pub mod sequence;
pub mod transform;

pub use exact::ExactSeries;
pub use fitting::AsymptoticForm;
pub use generators::CoefficientSource;
pub use precision::PrecisionConfig;
pub use ratio::RatioAnalysis;
pub use sequence::RealSequence;

/// Errors reported by the analysis modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("var_step mismatch: {0} vs {1}")]
    VarStepMismatch(u32, u32),
    #[error("series is not invertible: constant coefficient is zero")]
    NotInvertible,
    #[error("series_exp requires zero constant term")]
    NonzeroConstantTerm,
    #[error("coefficient at index {0} is not positive")]
    NonPositiveCoefficient(usize),
    #[error("{0}")]
    InvalidArgument(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("not enough usable points: got {got}, need {need}")]
    NotEnoughPoints { got: usize, need: usize },
    #[error("no monotone rows in extrapolation table; try a different w")]
    NoMonotoneRows,
    #[error("defect approximant: {0}")]
    Defect(String),
    #[error("all approximants defective")]
    AllDefective,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
