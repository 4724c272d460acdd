use thiserror::Error;

/// Errors raised by the arithmetic and Drinfeld-module routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("incompatible field towers: {0}")]
    TowerMismatch(String),
    #[error("field too large: p^n = {p}^{n} exceeds the supported size")]
    FieldTooLarge { p: u32, n: u32 },
    #[error("unsupported characteristic or base field: {0}")]
    BadField(String),
    #[error("value is zero to the available precision")]
    ZeroToPrec,
    #[error("sequence too short: need {needed}, have {have}")]
    InsufficientData { needed: usize, have: usize },
    #[error("no rational function of the requested degree matches")]
    NoMatch,
    #[error("wild ramification: Newton polygon slope {0} has denominator divisible by p")]
    WildRamification(String),
    #[error("residue field too large: degree {degree} over F_p exceeds the cap")]
    ResidueFieldTooLarge { degree: u32 },
    #[error("truncation insufficient to certify the value at t = theta: {0}")]
    InsufficientTruncation(String),
    #[error("constant term of the matrix is singular to precision")]
    NonUnitConstantTerm,
    #[error("logarithm series does not certifiably converge: {0}")]
    LogDivergence(String),
    #[error("torsion tower dies: only x = 0 lifts")]
    TowerDead,
    #[error("periods satisfy a bounded-height linear relation")]
    DependentPeriods,
    #[error("module is not normalized (leading coefficient must be 1)")]
    NotNormalized,
    #[error("determinant of Upsilon vanishes to precision")]
    SingularUpsilon,
    #[error("rational reconstruction failed: {0}")]
    ReconstructFailed(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("s must divide r (r = {r}, s = {s})")]
    BadDivisibility { r: usize, s: usize },
    #[error("insufficient precision for relation search: {0}")]
    InsufficientPrecision(String),
    #[error("endomorphism degree changes when enlarging the search caps ({0})")]
    InconclusiveBound(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
